#include "glcb/envs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace glcb {

Eigen::MatrixXd minmax_normalize(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("minmax_normalize: empty matrix");
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double lo = m.col(j).minCoeff();
    const double hi = m.col(j).maxCoeff();
    if (hi > lo)
      out.col(j) = (m.col(j).array() - lo) / (hi - lo);
    else
      out.col(j).setZero();
  }
  return out;
}

void WheelConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("WheelConfig: delta must lie in (0, 1)");
  if (!(mu_high > mu_low && mu_low > mu_mid))
    throw std::invalid_argument("WheelConfig: need mu_high > mu_low > mu_mid");
  if (noise_sigma < 0.0)
    throw std::invalid_argument("WheelConfig: noise_sigma must be >= 0");
  if (!(reward_min < reward_max))
    throw std::invalid_argument("WheelConfig: reward_min must be < reward_max");
  if (horizon < 1) throw std::invalid_argument("WheelConfig: horizon must be >= 1");
}

Vec wheel_means(const WheelConfig& config, const Vec& raw) {
  Vec means(5);
  means.setConstant(config.mu_mid);
  means[0] = config.mu_low;
  if (raw.norm() > config.delta) {
    int quadrant;
    if (raw[0] > 0.0)
      quadrant = raw[1] > 0.0 ? 1 : 2;
    else
      quadrant = raw[1] > 0.0 ? 3 : 4;
    means[quadrant] = config.mu_high;
  }
  return means;
}

WheelDraw wheel_step(const WheelConfig& config, Rng& rng) {
  config.validate();
  Vec raw(2);
  do {
    raw[0] = rng.uniform(-1.0, 1.0);
    raw[1] = rng.uniform(-1.0, 1.0);
  } while (raw.squaredNorm() > 1.0);
  WheelDraw draw;
  draw.context = (raw.array() + 1.0) / 2.0;
  draw.means = wheel_means(config, raw);
  draw.raw = std::move(raw);
  return draw;
}

WheelBandit::WheelBandit(WheelConfig config, std::uint64_t seed)
    : config_(config), rng_(Rng::stream(seed, "environment")) {
  config_.validate();
}

RewardKindInfo WheelBandit::reward_kind() const {
  return {RewardMode::kContinuous, config_.reward_min, config_.reward_max};
}

TaskStep WheelBandit::next() {
  WheelDraw draw = wheel_step(config_, rng_);
  Vec rewards(5);
  for (int a = 0; a < 5; ++a)
    rewards[a] = clip(draw.means[a] + rng_.normal(0.0, config_.noise_sigma),
                      config_.reward_min, config_.reward_max);
  return {std::move(draw.context), std::move(rewards)};
}

// ---------------------------------------------------------------------------
// CSV handling
// ---------------------------------------------------------------------------

int Csv::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string field = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    // Trim surrounding whitespace and a trailing CR.
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ' ||
                              field.back() == '\t'))
      field.pop_back();
    std::size_t i = 0;
    while (i < field.size() && (field[i] == ' ' || field[i] == '\t')) ++i;
    fields.push_back(field.substr(i));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(const std::string& s) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("CSV: non-numeric value '" + s + "'");
  return value;
}

}  // namespace

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("CSV: cannot open " + path);
  Csv csv;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("CSV: " + path + " is empty");
  csv.columns = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != csv.columns.size())
      throw std::runtime_error("CSV: row with " + std::to_string(fields.size()) +
                               " fields, expected " +
                               std::to_string(csv.columns.size()) + " in " + path);
    csv.rows.push_back(std::move(fields));
  }
  if (csv.rows.empty()) throw std::runtime_error("CSV: " + path + " has no rows");
  return csv;
}

namespace {

// Expands the chosen columns into a numeric matrix, one-hot encoding the
// categorical ones (category order = sorted distinct values).
Eigen::MatrixXd build_features(const Csv& csv, const std::vector<int>& cols,
                               const std::set<int>& categorical) {
  const long rows = static_cast<long>(csv.rows.size());
  std::vector<std::map<std::string, int>> encodings(cols.size());
  long width = 0;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (categorical.count(cols[c]) != 0U) {
      std::set<std::string> values;
      for (const auto& row : csv.rows)
        values.insert(row[static_cast<std::size_t>(cols[c])]);
      int idx = 0;
      for (const auto& v : values) encodings[c][v] = idx++;
      width += static_cast<long>(values.size());
    } else {
      width += 1;
    }
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, width);
  for (long r = 0; r < rows; ++r) {
    const auto& row = csv.rows[static_cast<std::size_t>(r)];
    long out = 0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string& cell = row[static_cast<std::size_t>(cols[c])];
      if (!encodings[c].empty()) {
        m(r, out + encodings[c].at(cell)) = 1.0;
        out += static_cast<long>(encodings[c].size());
      } else {
        m(r, out++) = parse_number(cell);
      }
    }
  }
  return m;
}

std::set<int> resolve_categorical(const Csv& csv,
                                  const std::vector<std::string>& names) {
  std::set<int> out;
  for (const auto& name : names) {
    const int idx = csv.column_index(name);
    if (idx < 0)
      throw std::runtime_error("CSV: unknown categorical column '" + name + "'");
    out.insert(idx);
  }
  return out;
}

}  // namespace

ClassificationData build_classification(
    const Csv& csv, const std::string& label_column,
    const std::vector<std::string>& categorical_columns) {
  const std::string label_name =
      label_column.empty() ? csv.columns.back() : label_column;
  const int label_idx = csv.column_index(label_name);
  if (label_idx < 0)
    throw std::runtime_error("CSV: unknown label column '" + label_name + "'");

  ClassificationData data;
  // Class ids follow the sorted distinct label set.
  std::set<std::string> classes;
  for (const auto& row : csv.rows)
    classes.insert(row[static_cast<std::size_t>(label_idx)]);
  std::map<std::string, int> class_of;
  int idx = 0;
  for (const auto& c : classes) class_of[c] = idx++;
  data.num_classes = idx;
  data.labels.reserve(csv.rows.size());
  for (const auto& row : csv.rows)
    data.labels.push_back(class_of.at(row[static_cast<std::size_t>(label_idx)]));

  std::vector<int> feature_cols;
  for (int c = 0; c < static_cast<int>(csv.columns.size()); ++c)
    if (c != label_idx) feature_cols.push_back(c);
  if (feature_cols.empty())
    throw std::runtime_error("CSV: no feature columns besides the label");
  data.features = minmax_normalize(
      build_features(csv, feature_cols, resolve_categorical(csv, categorical_columns)));
  return data;
}

RegressionData build_regression(
    const Csv& csv, const std::vector<std::string>& reward_columns,
    const std::vector<std::string>& categorical_columns) {
  if (reward_columns.empty())
    throw std::runtime_error("regression task: no reward columns declared");
  std::vector<int> reward_idx;
  for (const auto& name : reward_columns) {
    const int idx = csv.column_index(name);
    if (idx < 0)
      throw std::runtime_error("CSV: unknown reward column '" + name + "'");
    reward_idx.push_back(idx);
  }

  RegressionData data;
  const long rows = static_cast<long>(csv.rows.size());
  data.rewards.resize(rows, static_cast<long>(reward_idx.size()));
  for (long r = 0; r < rows; ++r)
    for (std::size_t a = 0; a < reward_idx.size(); ++a)
      data.rewards(r, static_cast<long>(a)) = parse_number(
          csv.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(reward_idx[a])]);
  // One global affine map into [0,1] so the per-step argmax is preserved.
  const double lo = data.rewards.minCoeff();
  const double hi = data.rewards.maxCoeff();
  if (hi > lo)
    data.rewards = (data.rewards.array() - lo) / (hi - lo);
  else
    data.rewards.setZero();

  std::vector<int> feature_cols;
  for (int c = 0; c < static_cast<int>(csv.columns.size()); ++c)
    if (std::find(reward_idx.begin(), reward_idx.end(), c) == reward_idx.end())
      feature_cols.push_back(c);
  if (feature_cols.empty())
    throw std::runtime_error("CSV: no feature columns besides the rewards");
  data.features = minmax_normalize(
      build_features(csv, feature_cols, resolve_categorical(csv, categorical_columns)));
  return data;
}

std::vector<long> permutation(long n, Rng& rng) {
  std::vector<long> order(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (long i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[rng.uniform_int(static_cast<std::uint64_t>(i + 1))]);
  return order;
}

namespace {

long dataset_horizon(long rows, long cap) {
  const long wanted = cap > 0 ? cap : 5000;
  return std::min(wanted, rows);
}

}  // namespace

ClassificationBandit::ClassificationBandit(
    std::string name, std::shared_ptr<const ClassificationData> data,
    long horizon_cap, std::uint64_t seed)
    : name_(std::move(name)), data_(std::move(data)) {
  Rng rng = Rng::stream(seed, "environment");
  order_ = permutation(static_cast<long>(data_->labels.size()), rng);
  horizon_ = dataset_horizon(static_cast<long>(data_->labels.size()), horizon_cap);
}

TaskStep ClassificationBandit::next() {
  if (pos_ >= static_cast<long>(order_.size()))
    throw std::runtime_error("ClassificationBandit: dataset exhausted");
  const long row = order_[static_cast<std::size_t>(pos_++)];
  TaskStep step;
  step.context = data_->features.row(row).transpose();
  step.rewards = Vec::Zero(data_->num_classes);
  step.rewards[data_->labels[static_cast<std::size_t>(row)]] = 1.0;
  return step;
}

RegressionBandit::RegressionBandit(std::string name,
                                   std::shared_ptr<const RegressionData> data,
                                   long horizon_cap, std::uint64_t seed)
    : name_(std::move(name)), data_(std::move(data)) {
  Rng rng = Rng::stream(seed, "environment");
  order_ = permutation(data_->rewards.rows(), rng);
  horizon_ = dataset_horizon(data_->rewards.rows(), horizon_cap);
}

TaskStep RegressionBandit::next() {
  if (pos_ >= static_cast<long>(order_.size()))
    throw std::runtime_error("RegressionBandit: dataset exhausted");
  const long row = order_[static_cast<std::size_t>(pos_++)];
  TaskStep step;
  step.context = data_->features.row(row).transpose();
  step.rewards = data_->rewards.row(row).transpose();
  return step;
}

std::unique_ptr<BanditTask> make_task(const TaskSpec& spec, std::uint64_t seed) {
  std::string kind = spec.kind;
  if (kind.empty()) {
    if (spec.name == "wheel") kind = "wheel";
    else if (spec.name == "statlog" || spec.name == "adult" ||
             spec.name == "census" || spec.name == "covertype")
      kind = "classification";
    else if (spec.name == "jester" || spec.name == "financial")
      kind = "regression";
    else
      throw std::runtime_error("make_task: unknown task name '" + spec.name +
                               "' (set kind explicitly)");
  }

  if (kind == "wheel") {
    WheelConfig cfg = spec.wheel;
    if (spec.horizon > 0) cfg.horizon = spec.horizon;
    return std::make_unique<WheelBandit>(cfg, seed);
  }
  if (kind == "classification") {
    if (spec.path.empty())
      throw std::runtime_error("make_task: classification task needs a CSV path");
    auto data = std::make_shared<ClassificationData>(build_classification(
        read_csv(spec.path), spec.label_column, spec.categorical_columns));
    return std::make_unique<ClassificationBandit>(
        spec.name.empty() ? "classification" : spec.name, std::move(data),
        spec.horizon, seed);
  }
  if (kind == "regression") {
    if (spec.path.empty())
      throw std::runtime_error("make_task: regression task needs a CSV path");
    auto data = std::make_shared<RegressionData>(build_regression(
        read_csv(spec.path), spec.reward_columns, spec.categorical_columns));
    return std::make_unique<RegressionBandit>(
        spec.name.empty() ? "regression" : spec.name, std::move(data),
        spec.horizon, seed);
  }
  throw std::runtime_error("make_task: unknown task kind '" + kind + "'");
}

}  // namespace glcb
