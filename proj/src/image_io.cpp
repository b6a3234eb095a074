#include "relocnet/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <cstdint>
#include <fstream>

#include "relocnet/errors.hpp"

namespace relocnet {

Tensor load_rgb_image(const std::string& path) {
  cv::Mat img = cv::imread(path, cv::IMREAD_COLOR);
  if (img.empty()) throw IngestionError("cannot read image: " + path);
  Tensor t({3, std::size_t(img.rows), std::size_t(img.cols)});
  for (int y = 0; y < img.rows; ++y) {
    const auto* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.cols; ++x) {
      // OpenCV loads BGR
      t.at3(0, y, x) = row[x][2] / 255.0;
      t.at3(1, y, x) = row[x][1] / 255.0;
      t.at3(2, y, x) = row[x][0] / 255.0;
    }
  }
  return t;
}

Tensor load_depth_image(const std::string& path, double scale) {
  cv::Mat img = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (img.empty()) throw IngestionError("cannot read depth image: " + path);
  if (img.channels() != 1)
    throw IngestionError("depth image is not single-channel: " + path);
  Tensor t({std::size_t(img.rows), std::size_t(img.cols)});
  for (int y = 0; y < img.rows; ++y) {
    for (int x = 0; x < img.cols; ++x) {
      double v = 0;
      if (img.depth() == CV_16U)
        v = img.at<std::uint16_t>(y, x);
      else if (img.depth() == CV_8U)
        v = img.at<std::uint8_t>(y, x);
      else
        throw IngestionError("unsupported depth image type: " + path);
      t.at2(y, x) = v / scale;
    }
  }
  return t;
}

void save_rgb_image(const Tensor& rgb, const std::string& path) {
  if (rgb.rank() != 3 || rgb.dim(0) != 3)
    throw ContractViolation("save_rgb_image expects (3, H, W)");
  cv::Mat img(int(rgb.dim(1)), int(rgb.dim(2)), CV_8UC3);
  for (int y = 0; y < img.rows; ++y) {
    auto* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.cols; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(rgb.at3(c, y, x), 0.0, 1.0);
        row[x][2 - c] = static_cast<unsigned char>(v * 255.0 + 0.5);
      }
    }
  }
  if (!cv::imwrite(path, img))
    throw IngestionError("cannot write image: " + path);
}

void save_depth_image(const Tensor& depth, const std::string& path,
                      double scale) {
  if (depth.rank() != 2)
    throw ContractViolation("save_depth_image expects (H, W)");
  cv::Mat img(int(depth.dim(0)), int(depth.dim(1)), CV_16UC1);
  for (int y = 0; y < img.rows; ++y)
    for (int x = 0; x < img.cols; ++x)
      img.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(
          std::clamp(depth.at2(y, x) * scale + 0.5, 0.0, 65535.0));
  if (!cv::imwrite(path, img))
    throw IngestionError("cannot write depth image: " + path);
}

void save_tensor(const Tensor& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IngestionError("cannot open for writing: " + path);
  const std::uint64_t rank = t.rank();
  f.write(reinterpret_cast<const char*>(&rank), sizeof(rank));
  for (auto d : t.shape()) {
    const std::uint64_t v = d;
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  f.write(reinterpret_cast<const char*>(t.data()),
          std::streamsize(t.size() * sizeof(double)));
  if (!f) throw IngestionError("write failed: " + path);
}

Tensor load_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IngestionError("cannot open tensor file: " + path);
  std::uint64_t rank = 0;
  f.read(reinterpret_cast<char*>(&rank), sizeof(rank));
  if (!f || rank > 8) throw IngestionError("corrupt tensor file: " + path);
  std::vector<std::size_t> shape(rank);
  for (auto& d : shape) {
    std::uint64_t v = 0;
    f.read(reinterpret_cast<char*>(&v), sizeof(v));
    d = v;
  }
  Tensor t(shape);
  f.read(reinterpret_cast<char*>(t.data()),
         std::streamsize(t.size() * sizeof(double)));
  if (!f) throw IngestionError("truncated tensor file: " + path);
  return t;
}

}  // namespace relocnet
