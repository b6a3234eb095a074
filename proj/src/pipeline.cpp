#include "relocnet/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "relocnet/errors.hpp"

namespace relocnet {

std::size_t ModalitySpec::channels() const {
  switch (kind) {
    case Modality::Depth: return 1;
    case Modality::Gray: return 1;
    case Modality::Rgb: return 3;
    case Modality::PointCloud: return 3;
    case Modality::RgbDepth: return 4;
    case Modality::RgbPointCloud: return 6;
  }
  return 0;
}

std::string ModalitySpec::name() const {
  switch (kind) {
    case Modality::Depth: return "depth";
    case Modality::Gray: return "gray";
    case Modality::Rgb: return "rgb";
    case Modality::PointCloud: return "pointcloud";
    case Modality::RgbDepth: return "rgb+depth";
    case Modality::RgbPointCloud: return "rgb+pointcloud";
  }
  return "?";
}

bool ModalitySpec::needs_depth() const {
  return kind == Modality::Depth || kind == Modality::PointCloud ||
         kind == Modality::RgbDepth || kind == Modality::RgbPointCloud;
}

ModalitySpec ModalitySpec::from_name(const std::string& name) {
  for (auto k : {Modality::Depth, Modality::Gray, Modality::Rgb,
                 Modality::PointCloud, Modality::RgbDepth,
                 Modality::RgbPointCloud}) {
    ModalitySpec m{k};
    if (m.name() == name) return m;
  }
  throw ContractViolation("unknown modality: " + name);
}

Tensor center_crop_resize(const Tensor& image, std::size_t side,
                          bool bilinear) {
  if (image.rank() != 3 || image.empty())
    throw ContractViolation("center_crop_resize expects a nonempty (C,H,W)");
  if (side == 0) throw ContractViolation("side must be positive");
  const std::size_t c = image.dim(0), h = image.dim(1), w = image.dim(2);
  const std::size_t crop = std::min(h, w);
  const std::size_t y0 = (h - crop) / 2, x0 = (w - crop) / 2;

  Tensor out({c, side, side});
  const double scale = double(crop) / double(side);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t oy = 0; oy < side; ++oy) {
      // center-aligned sample positions within the crop
      const double sy = (double(oy) + 0.5) * scale - 0.5;
      for (std::size_t ox = 0; ox < side; ++ox) {
        const double sx = (double(ox) + 0.5) * scale - 0.5;
        double v;
        if (bilinear) {
          const double fy = std::clamp(sy, 0.0, double(crop - 1));
          const double fx = std::clamp(sx, 0.0, double(crop - 1));
          const std::size_t iy0 = std::size_t(fy);
          const std::size_t ix0 = std::size_t(fx);
          const std::size_t iy1 = std::min(iy0 + 1, crop - 1);
          const std::size_t ix1 = std::min(ix0 + 1, crop - 1);
          const double ay = fy - double(iy0), ax = fx - double(ix0);
          const double v00 = image.at3(ch, y0 + iy0, x0 + ix0);
          const double v01 = image.at3(ch, y0 + iy0, x0 + ix1);
          const double v10 = image.at3(ch, y0 + iy1, x0 + ix0);
          const double v11 = image.at3(ch, y0 + iy1, x0 + ix1);
          v = (1 - ay) * ((1 - ax) * v00 + ax * v01) +
              ay * ((1 - ax) * v10 + ax * v11);
        } else {
          const long iy = std::clamp<long>(std::lround(sy), 0, long(crop) - 1);
          const long ix = std::clamp<long>(std::lround(sx), 0, long(crop) - 1);
          v = image.at3(ch, y0 + std::size_t(iy), x0 + std::size_t(ix));
        }
        out.at3(ch, oy, ox) = v;
      }
    }
  }
  return out;
}

Tensor depth_to_pointcloud(const Tensor& depth, const Intrinsics& intr) {
  if (depth.rank() != 2)
    throw ContractViolation("depth_to_pointcloud expects (H,W)");
  const std::size_t h = depth.dim(0), w = depth.dim(1);
  Tensor xyz({3, h, w});
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      const double z = depth.at2(v, u);
      if (z <= 0.0) continue;  // invalid sentinel -> (0,0,0)
      xyz.at3(0, v, u) = (double(u) - intr.cx) * z / intr.fx;
      xyz.at3(1, v, u) = (double(v) - intr.cy) * z / intr.fy;
      xyz.at3(2, v, u) = z;
    }
  }
  return xyz;
}

Tensor to_gray(const Tensor& rgb) {
  if (rgb.rank() != 3 || rgb.dim(0) != 3)
    throw ContractViolation("to_gray expects (3,H,W)");
  const std::size_t h = rgb.dim(1), w = rgb.dim(2);
  Tensor g({1, h, w});
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      g.at3(0, y, x) = 0.299 * rgb.at3(0, y, x) + 0.587 * rgb.at3(1, y, x) +
                       0.114 * rgb.at3(2, y, x);
  return g;
}

namespace {

Tensor depth_as_chw(const Tensor& depth) {
  return Tensor({1, depth.dim(0), depth.dim(1)},
                std::vector<double>(depth.data(), depth.data() + depth.size()));
}

void append_channels(std::vector<Tensor>& groups, Tensor t) {
  groups.push_back(std::move(t));
}

}  // namespace

NetInput assemble_input(const FrameRecord& frame, const ModalitySpec& modality,
                        const Intrinsics& intr, std::size_t side,
                        const Normalizer& norm) {
  FrameRecord f = frame;
  materialize_frame(f);
  const bool wants_rgb = modality.kind != Modality::Depth &&
                         modality.kind != Modality::PointCloud;
  if (wants_rgb && !f.rgb)
    throw ContractViolation("frame '" + f.frame_id + "' has no RGB payload");
  if (modality.needs_depth() && !f.depth)
    throw ContractViolation("frame '" + f.frame_id +
                            "' has no depth payload for modality " +
                            modality.name());

  // Channel groups before crop/resize; metric groups use nearest-neighbor.
  std::vector<Tensor> groups;
  std::vector<bool> bilinear;
  switch (modality.kind) {
    case Modality::Rgb:
      append_channels(groups, *f.rgb);
      bilinear.push_back(true);
      break;
    case Modality::Gray:
      append_channels(groups, to_gray(*f.rgb));
      bilinear.push_back(true);
      break;
    case Modality::Depth:
      append_channels(groups, depth_as_chw(*f.depth));
      bilinear.push_back(false);
      break;
    case Modality::PointCloud:
      append_channels(groups, depth_to_pointcloud(*f.depth, intr));
      bilinear.push_back(false);
      break;
    case Modality::RgbDepth:
      append_channels(groups, *f.rgb);
      bilinear.push_back(true);
      append_channels(groups, depth_as_chw(*f.depth));
      bilinear.push_back(false);
      break;
    case Modality::RgbPointCloud:
      append_channels(groups, *f.rgb);
      bilinear.push_back(true);
      append_channels(groups, depth_to_pointcloud(*f.depth, intr));
      bilinear.push_back(false);
      break;
  }

  NetInput in;
  in.modality = modality;
  in.frame_id = f.frame_id;
  in.data = Tensor({modality.channels(), side, side});
  std::size_t ch_out = 0;
  const bool metric_tail = modality.needs_depth();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Tensor resized = center_crop_resize(groups[g], side, bilinear[g]);
    const bool metric = metric_tail && (!bilinear[g]);
    for (std::size_t c = 0; c < resized.dim(0); ++c, ++ch_out) {
      const double mean = ch_out < norm.channel_means.size()
                              ? norm.channel_means[ch_out]
                              : 0.0;
      const double div = metric && norm.scene_scale > 0 ? norm.scene_scale : 1.0;
      for (std::size_t y = 0; y < side; ++y)
        for (std::size_t x = 0; x < side; ++x)
          in.data.at3(ch_out, y, x) =
              resized.at3(c, y, x) / div - mean;
    }
  }
  return in;
}

std::vector<double> compute_channel_means(
    const std::vector<const FrameRecord*>& frames, const ModalitySpec& modality,
    const Intrinsics& intr, std::size_t side, double scene_scale) {
  std::vector<double> means(modality.channels(), 0.0);
  if (frames.empty()) return means;
  std::size_t count = 0;
  Normalizer raw;  // zero means, scene scale still applied
  raw.scene_scale = scene_scale;
  for (const auto* f : frames) {
    const NetInput in = assemble_input(*f, modality, intr, side, raw);
    for (std::size_t c = 0; c < in.channels(); ++c) {
      double s = 0;
      for (std::size_t y = 0; y < side; ++y)
        for (std::size_t x = 0; x < side; ++x) s += in.data.at3(c, y, x);
      means[c] += s / double(side * side);
    }
    ++count;
  }
  for (auto& m : means) m /= double(count);
  return means;
}

}  // namespace relocnet
