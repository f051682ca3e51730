#include "pdmm/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "pdmm/init.hpp"
#include "pdmm/metrics.hpp"
#include "pdmm/pgm.hpp"

namespace pdmm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string mode_tag(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::single: return "single";
    case ExperimentMode::sweep_n: return "sweep-n";
    case ExperimentMode::sweep_k: return "sweep-k";
    case ExperimentMode::trace: return "trace";
    case ExperimentMode::image_tv: return "image-tv";
  }
  return "unknown";
}

std::string algorithm_tag(RegChoice reg) {
  switch (reg) {
    case RegChoice::none: return "pdmm";
    case RegChoice::l1_identity: return "pdmm-l1";
    case RegChoice::tv: return "pdmm-tv";
  }
  return "pdmm";
}

std::string out_stem(const std::string& out_path) {
  if (out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv")
    return out_path.substr(0, out_path.size() - 4);
  return out_path;
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(std::string("experiment spec: ") + message);
}

void check_strictly_increasing(const std::vector<Index>& list, const char* name) {
  require(!list.empty(), "sweep list must be non-empty");
  for (std::size_t i = 0; i + 1 < list.size(); ++i) {
    if (list[i] >= list[i + 1])
      throw std::invalid_argument(std::string("experiment spec: ") + name +
                                  " must be strictly increasing");
  }
}

struct SweepPoint {
  Index k = 0;
  Index n = 0;  // requested dense measurement count; ignored for masked DFT
};

std::vector<SweepPoint> sweep_points(const ExperimentSpec& spec) {
  switch (spec.mode) {
    case ExperimentMode::sweep_n: {
      std::vector<SweepPoint> pts;
      for (Index n : spec.n_list) pts.push_back({spec.k, n});
      return pts;
    }
    case ExperimentMode::sweep_k: {
      std::vector<SweepPoint> pts;
      for (Index k : spec.k_list) pts.push_back({k, spec.n});
      return pts;
    }
    default:
      return {{spec.k, spec.n}};
  }
}

CVec random_unit_signal(Index k, Rng& rng) {
  CVec x(k);
  for (Index i = 0; i < k; ++i) x[i] = Complex(rng.normal(), rng.normal());
  x.normalize();
  return x;
}

RegularizerKind resolve_reg_kind(const ExperimentSpec& spec) {
  if (spec.reg == RegChoice::l1_identity) return RegularizerKind::identity;
  // 1-D total variation is the first-difference penalty.
  return spec.mode == ExperimentMode::image_tv ? RegularizerKind::tv2d
                                               : RegularizerKind::diff1d;
}

void write_trace_file(const std::string& path,
                      const std::vector<std::array<double, 3>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file " + path);
  out << "seconds,nrmse,objective\n";
  for (const auto& r : rows)
    out << csv_number(r[0]) << "," << csv_number(r[1]) << "," << csv_number(r[2])
        << "\n";
}

std::string sanitize_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

SummaryRow summarize(std::vector<ResultRow>::const_iterator begin,
                     std::vector<ResultRow>::const_iterator end) {
  SummaryRow s;
  s.experiment = begin->experiment;
  s.k = begin->k;
  s.n = begin->n;
  s.b_value = begin->b_value;
  s.lambda = begin->lambda;
  s.algorithm = begin->algorithm;
  std::vector<double> nrms;
  double nrmse_sum = 0, sec_sum = 0;
  for (auto it = begin; it != end; ++it) {
    ++s.trials;
    sec_sum += it->seconds;
    if (std::isfinite(it->nrmse)) {
      nrms.push_back(it->nrmse);
      nrmse_sum += it->nrmse;
    } else {
      ++s.failures;
    }
  }
  s.seconds_mean = s.trials > 0 ? sec_sum / s.trials : 0.0;
  if (nrms.empty()) {
    s.nrmse_mean = s.nrmse_stderr = s.nrmse_median = kNaN;
    return s;
  }
  const auto count = static_cast<double>(nrms.size());
  s.nrmse_mean = nrmse_sum / count;
  double var = 0;
  for (double v : nrms) var += (v - s.nrmse_mean) * (v - s.nrmse_mean);
  s.nrmse_stderr =
      nrms.size() > 1 ? std::sqrt(var / (count - 1.0) / count) : 0.0;
  std::sort(nrms.begin(), nrms.end());
  const std::size_t mid = nrms.size() / 2;
  s.nrmse_median = nrms.size() % 2 == 1
                       ? nrms[mid]
                       : 0.5 * (nrms[mid - 1] + nrms[mid]);
  return s;
}

}  // namespace

void validate_spec(const ExperimentSpec& spec) {
  require(spec.trials >= 1, "trials must be >= 1");
  require(spec.masks >= 1, "mask count must be >= 1");
  require(spec.b_value >= 0.0, "background must be >= 0");
  require(spec.lambda >= 0.0, "lambda must be >= 0");
  require(spec.photon_scale > 0.0, "photon scale must be > 0");
  require(spec.solver.eta_outer > 0.0 && spec.solver.eta_inner > 0.0,
          "tolerances must be > 0");
  require(spec.solver.max_outer >= 1 && spec.solver.max_inner >= 1,
          "iteration caps must be >= 1");

  switch (spec.mode) {
    case ExperimentMode::sweep_n:
      require(spec.operator_kind == OperatorKind::random_dense,
              "sweep-n requires the random operator (masked-DFT fixes N "
              "through K and the mask count)");
      check_strictly_increasing(spec.n_list, "n-list");
      for (Index n : spec.n_list)
        require(n > spec.k, "every sweep N must exceed K");
      break;
    case ExperimentMode::sweep_k:
      check_strictly_increasing(spec.k_list, "k-list");
      for (Index k : spec.k_list) {
        require(k >= 2, "every sweep K must be >= 2");
        if (spec.operator_kind == OperatorKind::random_dense)
          require(k < spec.n, "every sweep K must be below N");
      }
      break;
    case ExperimentMode::image_tv:
      require(!spec.image_path.empty(), "image-tv requires an input image");
      require(!spec.out_path.empty(), "image-tv requires an output path");
      break;
    case ExperimentMode::trace:
      require(!spec.out_path.empty(), "trace mode requires an output path");
      [[fallthrough]];
    case ExperimentMode::single:
      require(spec.k >= (spec.operator_kind == OperatorKind::masked_dft ? 2 : 1),
              "K too small");
      if (spec.operator_kind == OperatorKind::random_dense)
        require(spec.n > spec.k, "N must exceed K");
      break;
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);
  ExperimentResult result;
  const std::string tag = mode_tag(spec.mode);
  const bool image_mode = spec.mode == ExperimentMode::image_tv;
  const bool trace_mode = spec.mode == ExperimentMode::trace;

  // Ground-truth image shared across trials in image mode.
  RMat image;
  CVec image_signal;
  Index side = 0;
  if (image_mode) {
    image = read_pgm(spec.image_path);
    if (image.rows() != image.cols())
      throw std::invalid_argument("image-tv: input image must be square");
    side = image.rows();
    image_signal = CVec(side * side);
    for (Index c = 0; c < side; ++c)
      for (Index r = 0; r < side; ++r)
        image_signal[r + c * side] = Complex(image(r, c), 0.0);
  }

  const std::vector<SweepPoint> points = sweep_points(spec);
  const double amp = std::sqrt(spec.photon_scale);

  for (std::size_t si = 0; si < points.size(); ++si) {
    const std::size_t first_row = result.rows.size();
    for (int ti = 0; ti < spec.trials; ++ti) {
      const std::uint64_t trial_seed =
          Rng::derive_seed(spec.seed, static_cast<std::uint64_t>(si),
                           static_cast<std::uint64_t>(ti));
      Rng rng(trial_seed);

      ResultRow row;
      row.experiment = tag;
      row.trial_seed = trial_seed;
      row.b_value = spec.b_value;
      const bool penalized = image_mode || spec.reg != RegChoice::none;
      row.lambda = penalized ? spec.lambda : 0.0;
      row.algorithm = algorithm_tag(image_mode ? RegChoice::tv : spec.reg);

      try {
        std::shared_ptr<const SensingOperator> op;
        CVec x_true;
        if (image_mode) {
          auto raw = make_masked_dft_image_operator(side, spec.masks, rng);
          op = normalize_operator(*raw, image_signal);
          x_true = amp * image_signal;
        } else if (spec.operator_kind == OperatorKind::masked_dft) {
          auto raw = make_masked_dft_operator(points[si].k, spec.masks, rng);
          const CVec unit = random_unit_signal(points[si].k, rng);
          op = normalize_operator(*raw, unit);
          x_true = amp * unit;
        } else {
          op = make_random_operator(points[si].n, points[si].k, rng);
          x_true = amp * random_unit_signal(points[si].k, rng);
        }
        row.k = op->cols();
        row.n = op->rows();

        RVec b = RVec::Constant(op->rows(), spec.b_value);
        PoissonProblem problem =
            sample_measurements(op, x_true, std::move(b), rng);

        InitOptions init_opts;
        init_opts.seed = trial_seed;
        init_opts.z_floor = spec.solver.z_floor;
        const InitResult init = initialize(problem, init_opts);

        std::vector<std::array<double, 3>> trace_rows;
        IterationCallback callback;
        if (trace_mode) {
          trace_rows.push_back({0.0, nrmse(init.x0, x_true),
                                neg_log_likelihood(problem, init.x0)});
          callback = [&](const TracePoint& p, const CVec& x) {
            trace_rows.push_back({p.seconds, nrmse(x, x_true), p.objective});
          };
        }

        SolveResult solved;
        if (penalized) {
          Regularizer reg = build_regularizer(
              resolve_reg_kind(spec), image_mode ? side : points[si].k,
              spec.lambda);
          const CVec w0 = make_random_w(reg.rows(), rng);
          solved = solve_regularized(problem, reg, init.x0, init.z0, w0,
                                     spec.solver, spec.curvature, callback);
        } else {
          solved = solve(problem, init.x0, init.z0, spec.solver, callback);
        }

        row.nrmse = nrmse(solved.x, x_true);
        row.objective = solved.trace.final_objective();
        row.outer_iters = solved.trace.outer_iters;
        row.inner_iters = solved.trace.total_inner_iters;
        row.seconds = solved.trace.seconds;
        row.status = to_string(solved.trace.status);

        if (trace_mode && !spec.out_path.empty()) {
          write_trace_file(
              out_stem(spec.out_path) + "-trace-" + std::to_string(ti) + ".csv",
              trace_rows);
        }
        if (image_mode && ti == 0) {
          const Complex phase = alignment_phase(solved.x, x_true);
          RMat recovered(side, side);
          for (Index c = 0; c < side; ++c)
            for (Index r = 0; r < side; ++r)
              recovered(r, c) =
                  std::real(solved.x[r + c * side] * std::conj(phase)) / amp;
          const std::string img_out =
              spec.out_image_path.empty()
                  ? out_stem(spec.out_path) + "-recovered.pgm"
                  : spec.out_image_path;
          write_pgm(img_out, recovered);
        }
      } catch (const std::exception&) {
        row.nrmse = kNaN;
        row.objective = kNaN;
        row.status = "aborted";
        if (row.k == 0) row.k = image_mode ? side * side : points[si].k;
        if (row.n == 0) row.n = points[si].n;
      }
      result.rows.push_back(std::move(row));
    }
    result.summary.push_back(summarize(result.rows.cbegin() + first_row,
                                       result.rows.cend()));
  }
  return result;
}

std::string csv_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path,
               TimingColumn timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open CSV output " + path);
  out << "experiment,trial_seed,k,n,b,lambda,algorithm,nrmse,objective,"
         "outer_iters,inner_iters,seconds,status\n";
  for (const ResultRow& r : rows) {
    out << sanitize_field(r.experiment) << "," << r.trial_seed << "," << r.k
        << "," << r.n << "," << csv_number(r.b_value) << ","
        << csv_number(r.lambda) << "," << sanitize_field(r.algorithm) << ","
        << csv_number(r.nrmse) << "," << csv_number(r.objective) << ","
        << r.outer_iters << "," << r.inner_iters << ","
        << csv_number(timing == TimingColumn::wall ? r.seconds : 0.0) << ","
        << sanitize_field(r.status) << "\n";
  }
  if (!out) throw std::runtime_error("CSV write failed: " + path);
}

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path, TimingColumn timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open CSV output " + path);
  out << "experiment,k,n,b,lambda,algorithm,trials,failures,nrmse_mean,"
         "nrmse_stderr,nrmse_median,seconds_mean\n";
  for (const SummaryRow& r : rows) {
    out << sanitize_field(r.experiment) << "," << r.k << "," << r.n << ","
        << csv_number(r.b_value) << "," << csv_number(r.lambda) << ","
        << sanitize_field(r.algorithm) << "," << r.trials << "," << r.failures
        << "," << csv_number(r.nrmse_mean) << "," << csv_number(r.nrmse_stderr)
        << "," << csv_number(r.nrmse_median) << ","
        << csv_number(timing == TimingColumn::wall ? r.seconds_mean : 0.0)
        << "\n";
  }
  if (!out) throw std::runtime_error("CSV write failed: " + path);
}

}  // namespace pdmm
