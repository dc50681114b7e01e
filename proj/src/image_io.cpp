// Copyright 2026 The SCL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "scl/image_io.hpp"

#include <cstring>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <vector>

namespace scl {

namespace {

cv::Mat decode(const std::filesystem::path& path) {
  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
  if (m.empty()) throw DecodeError(path.string() + ": cannot decode image");
  if (m.depth() == CV_16U) {
    cv::Mat eight;
    m.convertTo(eight, CV_8U, 1.0 / 257.0);
    m = eight;
  } else if (m.depth() != CV_8U) {
    throw DecodeError(path.string() + ": unsupported sample depth");
  }
  return m;
}

// Copies an 8-bit BGR(A)/gray Mat into an interleaved RGB(A) raster.
template <int C>
Raster<C> from_mat(const cv::Mat& m) {
  Raster<C> out(m.cols, m.rows, 0);
  const int mc = m.channels();
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* s = m.ptr<std::uint8_t>(y);
    std::uint8_t* d = out.pixel(0, y);
    for (int x = 0; x < m.cols; ++x, s += mc, d += C) {
      if (mc == 1) {
        d[0] = d[1] = d[2] = s[0];
      } else if (mc == 2) {  // gray + alpha
        d[0] = d[1] = d[2] = s[0];
      } else {
        d[0] = s[2], d[1] = s[1], d[2] = s[0];
      }
      if constexpr (C == 4) {
        d[3] = mc == 4 ? s[3] : (mc == 2 ? s[1] : 255);
      }
    }
  }
  return out;
}

template <int C>
cv::Mat to_mat(const Raster<C>& img) {
  cv::Mat m(img.height(), img.width(), C == 4 ? CV_8UC4 : CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    const std::uint8_t* s = img.pixel(0, y);
    std::uint8_t* d = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x, s += C, d += C) {
      d[0] = s[2], d[1] = s[1], d[2] = s[0];
      if constexpr (C == 4) d[3] = s[3];
    }
  }
  return m;
}

void encode(const std::filesystem::path& path, const cv::Mat& m, ImageFormat format) {
  std::vector<int> params;
  if (format == ImageFormat::png) {
    params = {cv::IMWRITE_PNG_COMPRESSION, 3};
  } else {
    params = {cv::IMWRITE_JPEG_QUALITY, 95};
  }
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m, params);
  } catch (const cv::Exception& e) {
    throw EncodeError(path.string() + ": " + e.what());
  }
  if (!ok) throw EncodeError(path.string() + ": cannot write image");
}

}  // namespace

RasterRGBA read_rgba(const std::filesystem::path& path) {
  const cv::Mat m = decode(path);
  if (m.channels() != 4 && m.channels() != 2) {
    throw NoAlphaError(path.string() + ": image has no alpha channel");
  }
  return from_mat<4>(m);
}

RasterRGB read_rgb(const std::filesystem::path& path) { return from_mat<3>(decode(path)); }

ImageSize probe_image(const std::filesystem::path& path) {
  const cv::Mat m = decode(path);
  return {m.cols, m.rows};
}

void write_image(const std::filesystem::path& path, const RasterRGB& img, ImageFormat format) {
  encode(path, to_mat(img), format);
}

void write_image(const std::filesystem::path& path, const RasterRGBA& img) {
  encode(path, to_mat(img), ImageFormat::png);
}

void configure_codec_threads() { cv::setNumThreads(0); }

}  // namespace scl
