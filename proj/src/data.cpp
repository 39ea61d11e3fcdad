#include "atclab/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "atclab/rng.hpp"

namespace atclab {

namespace {

constexpr double kMinMeanAngle = 0.3;
constexpr int kMaxRejections = 10000;

Vec random_unit(Rng& rng, int dim) {
  Vec v(dim);
  while (true) {
    for (auto& x : v) {
      x = rng.normal();
    }
    if (norm(v) >= kZeroNormEps) {
      return l2_normalize(v);
    }
  }
}

// Unit tangent at mean: isotropic Gaussian with the mean direction projected
// out, renormalized.
Vec random_tangent(Rng& rng, const Vec& mean) {
  const int dim = static_cast<int>(mean.size());
  Vec t(dim);
  while (true) {
    for (auto& x : t) {
      x = rng.normal();
    }
    const double p = dot(t, mean);
    for (int i = 0; i < dim; ++i) {
      t[i] -= p * mean[i];
    }
    if (norm(t) >= 1e-9) {
      return l2_normalize(t);
    }
  }
}

}  // namespace

int Dataset::num_classes() const {
  int k = 0;
  for (const auto& s : samples) {
    k = std::max(k, s.label);
  }
  return k;
}

SplitDataset generate(const SynthConfig& cfg) {
  if (cfg.num_classes < 2) {
    throw ConfigError("generate: num_classes must be >= 2");
  }
  if (cfg.per_class < 2) {
    throw ConfigError("generate: per_class must be >= 2");
  }
  if (cfg.dim < 2) {
    throw ConfigError("generate: dim must be >= 2");
  }
  if (!(cfg.spread > 0.0)) {
    throw ConfigError("generate: spread must be > 0");
  }

  Rng rng(cfg.seed);
  std::vector<Vec> means;
  means.reserve(cfg.num_classes);
  int rejections = 0;
  while (static_cast<int>(means.size()) < cfg.num_classes) {
    Vec m = random_unit(rng, cfg.dim);
    bool ok = true;
    for (const auto& other : means) {
      if (angular_distance(m, other) < kMinMeanAngle) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      if (++rejections > kMaxRejections) {
        throw ConfigError("generate: could not space " +
                          std::to_string(cfg.num_classes) + " class means in " +
                          std::to_string(cfg.dim) + " dims");
      }
      continue;
    }
    means.push_back(std::move(m));
  }

  const int n_train = cfg.per_class * 8 / 10;
  const int n_val = cfg.per_class / 10;

  SplitDataset out;
  out.num_classes = cfg.num_classes;
  out.train.dim = out.val.dim = out.test.dim = cfg.dim;
  for (int k = 1; k <= cfg.num_classes; ++k) {
    const Vec& mean = means[k - 1];
    for (int s = 0; s < cfg.per_class; ++s) {
      const Vec tangent = random_tangent(rng, mean);
      const double theta = std::fabs(rng.normal(0.0, cfg.spread));
      const double mag = rng.uniform(0.5, 2.0);
      Vec x(cfg.dim);
      const double ct = std::cos(theta);
      const double st = std::sin(theta);
      for (int t = 0; t < cfg.dim; ++t) {
        x[t] = mag * (ct * mean[t] + st * tangent[t]);
      }
      Dataset& split =
          s < n_train ? out.train : (s < n_train + n_val ? out.val : out.test);
      split.samples.push_back({k, std::move(x)});
    }
  }
  return out;
}

void write_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream f(path);
  if (!f) {
    throw IoError("write_dataset: cannot open " + path);
  }
  f << "dim=" << ds.dim << " count=" << ds.samples.size() << "\n";
  char buf[64];
  for (const auto& s : ds.samples) {
    f << s.label << ',';
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g", s.x[i]);
      if (i > 0) {
        f << ' ';
      }
      f << buf;
    }
    f << '\n';
  }
  if (!f) {
    throw IoError("write_dataset: write failed for " + path);
  }
}

Dataset read_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    throw IoError("read_dataset: cannot open " + path);
  }
  std::string line;
  if (!std::getline(f, line)) {
    throw ParseError(1, "missing header");
  }
  int dim = 0;
  long long count = 0;
  if (std::sscanf(line.c_str(), "dim=%d count=%lld", &dim, &count) != 2 ||
      dim < 1 || count < 0) {
    throw ParseError(1, "malformed header: " + line);
  }

  Dataset ds;
  ds.dim = dim;
  ds.samples.reserve(static_cast<std::size_t>(count));
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() && static_cast<long long>(ds.samples.size()) == count) {
      continue;  // tolerate trailing blank lines
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(line_no, "expected '<label>,<values>'");
    }
    Sample s;
    try {
      std::size_t used = 0;
      s.label = std::stoi(line.substr(0, comma), &used);
      if (used != comma) {
        throw std::invalid_argument("trailing");
      }
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad label: " + line.substr(0, comma));
    }
    if (s.label < 1) {
      throw ParseError(line_no, "label must be >= 1");
    }
    std::istringstream vals(line.substr(comma + 1));
    double v = 0.0;
    while (vals >> v) {
      s.x.push_back(v);
    }
    if (!vals.eof()) {
      throw ParseError(line_no, "non-numeric value");
    }
    if (static_cast<int>(s.x.size()) != dim) {
      throw ParseError(line_no, "expected " + std::to_string(dim) +
                                    " values, got " +
                                    std::to_string(s.x.size()));
    }
    ds.samples.push_back(std::move(s));
  }
  if (static_cast<long long>(ds.samples.size()) != count) {
    throw ParseError(line_no, "header count " + std::to_string(count) +
                                  " != " + std::to_string(ds.samples.size()) +
                                  " rows");
  }
  return ds;
}

}  // namespace atclab
