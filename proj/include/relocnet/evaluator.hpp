#pragma once

#include <functional>
#include <string>
#include <vector>

#include "relocnet/dataset.hpp"
#include "relocnet/model.hpp"
#include "relocnet/pipeline.hpp"
#include "relocnet/pose.hpp"

namespace relocnet {

struct FrameEval {
  std::string frame_id;
  double position_error_m = 0.0;
  double angle_error_deg = 0.0;
  PoseVector predicted{};      // quaternion part normalized
  PoseVector predicted_raw{};  // raw network output, kept for audit
};

struct EvalReport {
  std::vector<FrameEval> frames;
  double mean_position_error = 0.0, std_position_error = 0.0;
  double mean_angle_error = 0.0, std_angle_error = 0.0;

  std::string arch_name, modality, dataset;
  int stage_index = -1;
  std::size_t param_count = 0;

  /// Population statistics (divide by N) over per-frame errors.
  void recompute_aggregates();

  std::string to_json() const;
  static EvalReport from_json(const std::string& text);
};

/// Per-frame forward + metric computation over a test trajectory.
EvalReport evaluate(Model& model, const Trajectory& test,
                    const ModalitySpec& modality, std::size_t side,
                    const Normalizer& norm = {});

/// Same, with an arbitrary predictor (tests use ground-truth oracles).
using Predictor = std::function<PoseVector(const FrameRecord&)>;
EvalReport evaluate_with(const Predictor& predict, const Trajectory& test);

/// Literature reference rows shipped as display-only data.
struct ReferenceRow {
  std::string name;
  std::map<std::string, double> position;  // dataset -> meters
  std::map<std::string, double> angle;     // dataset -> degrees
};
std::vector<ReferenceRow> load_reference_rows(const std::string& path);

struct ComparisonTable {
  std::vector<std::string> rows;     // computed archs then reference rows
  std::vector<bool> is_reference;
  std::vector<std::string> columns;  // dataset names
  // cell[i][j]; absent cells render NA
  struct Cell {
    bool present = false;
    bool has_std = false;
    double mean = 0.0, stddev = 0.0;
  };
  std::vector<std::vector<Cell>> position_cells, angle_cells;

  std::string render(bool angles = false) const;
};

ComparisonTable build_comparison(const std::vector<EvalReport>& reports,
                                 const std::vector<ReferenceRow>& references);

/// Columnar plot data: "x,y,z,role" rows with roles train/test/predicted
/// (rendered red/green/blue downstream). Deterministic byte output.
void export_trajectory_plot_data(const EvalReport& report,
                                 const std::vector<const Trajectory*>& train,
                                 const Trajectory& test,
                                 const std::string& out_path);

struct CurriculumPoint {
  std::size_t stage = 0;
  double mean_position_error = 0.0;
  double mean_angle_error = 0.0;
  std::size_t param_count = 0;
};

/// Error-vs-trajectory-count series; throws ContractViolation if stage
/// reports disagree on parameter count.
std::vector<CurriculumPoint> curriculum_curve(
    const std::vector<EvalReport>& stage_reports);

}  // namespace relocnet
