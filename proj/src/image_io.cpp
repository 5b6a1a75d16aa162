#include "uphdr/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace uphdr::io {

bool has_extension(const std::string& path, const char* ext) {
    std::string e = std::filesystem::path(path).extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return e == ext;
}

namespace {

Image from_mat(const cv::Mat& m, double scale) {
    Image img(m.rows, m.cols, m.channels());
    for (int y = 0; y < m.rows; ++y) {
        for (int x = 0; x < m.cols; ++x) {
            // OpenCV stores BGR; flip to RGB.
            if (m.depth() == CV_8U) {
                const auto& p = m.at<cv::Vec3b>(y, x);
                for (int c = 0; c < 3; ++c) img.at(y, x, c) = p[2 - c] * scale;
            } else if (m.depth() == CV_16U) {
                const auto& p = m.at<cv::Vec3w>(y, x);
                for (int c = 0; c < 3; ++c) img.at(y, x, c) = p[2 - c] * scale;
            } else {
                const auto& p = m.at<cv::Vec3f>(y, x);
                for (int c = 0; c < 3; ++c) img.at(y, x, c) = p[2 - c] * scale;
            }
        }
    }
    return img;
}

cv::Mat to_mat8(const Image& img) {
    cv::Mat m(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            auto& p = m.at<cv::Vec3b>(y, x);
            for (int c = 0; c < 3; ++c) {
                double v = std::clamp(img.at(y, x, img.channels == 1 ? 0 : c), 0.0, 1.0);
                p[2 - c] = static_cast<uchar>(std::lround(v * 255.0));
            }
        }
    return m;
}

}  // namespace

Image load_ldr_image(const std::string& path) {
    if (!std::filesystem::exists(path)) throw IoError("file not found: " + path);
    cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED | cv::IMREAD_COLOR);
    if (m.empty()) {
        // retry preserving bit depth for 16-bit PNGs
        m = cv::imread(path, cv::IMREAD_ANYDEPTH | cv::IMREAD_ANYCOLOR);
    }
    if (m.empty()) throw IoError("could not decode image: " + path);
    if (m.channels() == 1) cv::cvtColor(m, m, cv::COLOR_GRAY2BGR);
    if (m.channels() == 4) cv::cvtColor(m, m, cv::COLOR_BGRA2BGR);
    if (m.depth() == CV_8U) return from_mat(m, 1.0 / 255.0);
    if (m.depth() == CV_16U) return from_mat(m, 1.0 / 65535.0);
    throw IoError("unsupported LDR bit depth in " + path);
}

Image load_hdr_image(const std::string& path) {
    if (has_extension(path, ".pfm")) return load_pfm(path);
    if (!std::filesystem::exists(path)) throw IoError("file not found: " + path);
    cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (m.empty() || m.depth() != CV_32F)
        throw IoError("could not decode HDR image: " + path);
    if (m.channels() == 1) cv::cvtColor(m, m, cv::COLOR_GRAY2BGR);
    Image img = from_mat(m, 1.0);
    // Radiance files occasionally carry tiny negative values from RLE decode noise.
    for (double& v : img.data) v = std::max(v, 0.0);
    return img;
}

Image load_image(const std::string& path) {
    if (has_extension(path, ".hdr") || has_extension(path, ".pfm"))
        return load_hdr_image(path);
    return load_ldr_image(path);
}

void save_png(const std::string& path, const Image& img) {
    if (!cv::imwrite(path, to_mat8(img)))
        throw IoError("could not write PNG: " + path);
}

void save_png16(const std::string& path, const Image& img) {
    cv::Mat m(img.height, img.width, CV_16UC3);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            auto& p = m.at<cv::Vec3w>(y, x);
            for (int c = 0; c < 3; ++c) {
                double v = std::clamp(img.at(y, x, img.channels == 1 ? 0 : c), 0.0, 1.0);
                p[2 - c] = static_cast<ushort>(std::lround(v * 65535.0));
            }
        }
    if (!cv::imwrite(path, m)) throw IoError("could not write PNG: " + path);
}

void save_pfm(const std::string& path, const Image& img) {
    if (img.channels != 3) throw IoError("PFM writer expects 3 channels");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("could not open for writing: " + path);
    f << "PF\n" << img.width << " " << img.height << "\n-1.0\n";
    // scanlines bottom-up
    std::vector<float> row(static_cast<size_t>(img.width) * 3);
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c)
                row[static_cast<size_t>(x) * 3 + c] = static_cast<float>(img.at(y, x, c));
        f.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!f) throw IoError("short write: " + path);
}

Image load_pfm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("file not found: " + path);
    std::string magic;
    f >> magic;
    if (magic != "PF") throw IoError("not a color PFM file: " + path);
    int w = 0, h = 0;
    double scale = 0.0;
    f >> w >> h >> scale;
    if (w <= 0 || h <= 0) throw IoError("bad PFM dimensions in " + path);
    if (scale >= 0.0) throw IoError("big-endian PFM not supported: " + path);
    f.get();  // single whitespace after the header
    Image img(h, w, 3);
    std::vector<float> row(static_cast<size_t>(w) * 3);
    for (int y = h - 1; y >= 0; --y) {
        f.read(reinterpret_cast<char*>(row.data()),
               static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!f) throw IoError("truncated PFM data in " + path);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(y, x, c) = row[static_cast<size_t>(x) * 3 + c];
    }
    return img;
}

}  // namespace uphdr::io
