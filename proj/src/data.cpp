#include "ordcif/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "ordcif/errors.hpp"

namespace ordcif {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

FailureRecord make_record(double time, int cause) {
  if (!std::isfinite(time) || time <= 0.0)
    throw DataError("time must be positive and finite");
  if (cause < 0 || cause > 2) throw DataError("cause must be 0, 1 or 2");
  return FailureRecord{time, static_cast<Cause>(cause)};
}

bool GroupSample::censored() const noexcept {
  return std::any_of(records.begin(), records.end(),
                     [](const FailureRecord& r) { return r.cause == Cause::Censored; });
}

std::size_t GroupSample::count(Cause c) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [c](const FailureRecord& r) { return r.cause == c; }));
}

double GroupSample::max_time() const {
  if (records.empty()) throw DataError("group '" + label + "' is empty");
  double m = records.front().time;
  for (const auto& r : records) m = std::max(m, r.time);
  return m;
}

MultiGroupDataset::MultiGroupDataset(std::vector<GroupSample> groups) : groups_(std::move(groups)) {
  if (groups_.size() < 2) throw DataError("at least two groups are required");
  std::set<std::string> seen;
  for (const auto& g : groups_) {
    if (!seen.insert(g.label).second) throw DataError("duplicate group label '" + g.label + "'");
    if (g.records.empty()) throw DataError("group '" + g.label + "' is empty");
    for (const auto& r : g.records) {
      if (!std::isfinite(r.time) || r.time <= 0.0)
        throw DataError("group '" + g.label + "': time must be positive and finite");
      const int c = static_cast<int>(r.cause);
      if (c < 0 || c > 2) throw DataError("group '" + g.label + "': invalid cause code");
    }
    n_ += g.records.size();
    censored_ = censored_ || g.censored();
  }
}

Eigen::VectorXd MultiGroupDataset::sizes() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(groups_.size()));
  for (std::size_t i = 0; i < groups_.size(); ++i)
    w[static_cast<Eigen::Index>(i)] = static_cast<double>(groups_[i].size());
  return w;
}

Eigen::VectorXd MultiGroupDataset::proportions() const {
  return sizes() / static_cast<double>(n_);
}

double MultiGroupDataset::common_horizon() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& g : groups_) h = std::min(h, g.max_time());
  return h;
}

std::size_t MultiGroupDataset::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < groups_.size(); ++i)
    if (groups_[i].label == label) return i;
  throw DataError("unknown group label '" + label + "'");
}

MultiGroupDataset ingest_csv(std::istream& in, const std::vector<std::string>& order) {
  if (order.size() < 2) throw DataError("group order must list at least two groups");
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<GroupSample> groups;
  for (const auto& label : order) {
    if (!slot.emplace(label, groups.size()).second)
      throw DataError("group '" + label + "' listed twice in the order");
    groups.push_back(GroupSample{label, {}});
  }

  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (lineno == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view = trim(view.substr(3));
    if (view.empty()) continue;
    const auto fields = split_commas(view);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "group" || fields[1] != "time" || fields[2] != "cause")
        throw DataError("expected header 'group,time,cause'", lineno);
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) throw DataError("expected 3 fields", lineno);
    double time = 0.0;
    int cause = -1;
    if (!parse_number(fields[1], time)) throw DataError("non-numeric time", lineno);
    if (!parse_number(fields[2], cause)) throw DataError("non-integer cause", lineno);
    if (!std::isfinite(time) || time <= 0.0) throw DataError("time must be positive", lineno);
    if (cause < 0 || cause > 2) throw DataError("cause must be 0, 1 or 2", lineno);
    const auto it = slot.find(std::string(fields[0]));
    if (it == slot.end())
      throw DataError("unknown group label '" + std::string(fields[0]) + "'", lineno);
    groups[it->second].records.push_back(FailureRecord{time, static_cast<Cause>(cause)});
  }
  if (!header_seen) throw DataError("missing header 'group,time,cause'");
  for (const auto& g : groups)
    if (g.records.empty()) throw DataError("group '" + g.label + "' has no records");
  return MultiGroupDataset(std::move(groups));
}

void write_csv(std::ostream& out, const MultiGroupDataset& data) {
  std::ostringstream buf;
  buf << "group,time,cause\n";
  char num[32];
  for (const auto& g : data.groups()) {
    for (const auto& r : g.records) {
      const auto res = std::to_chars(num, num + sizeof num, r.time);
      buf << g.label << ',' << std::string_view(num, static_cast<std::size_t>(res.ptr - num)) << ','
          << static_cast<int>(r.cause) << '\n';
    }
  }
  out << buf.str();
}

namespace {

Eigen::VectorXd distinct_sorted(std::vector<double> times) {
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return Eigen::Map<Eigen::VectorXd>(times.data(), static_cast<Eigen::Index>(times.size()));
}

}  // namespace

Eigen::VectorXd pooled_event_grid(const MultiGroupDataset& data) {
  std::vector<double> times;
  times.reserve(data.total_size());
  for (const auto& g : data.groups())
    for (const auto& r : g.records) times.push_back(r.time);
  return distinct_sorted(std::move(times));
}

Eigen::VectorXd event_grid(const GroupSample& group) {
  std::vector<double> times;
  times.reserve(group.size());
  for (const auto& r : group.records) times.push_back(r.time);
  return distinct_sorted(std::move(times));
}

}  // namespace ordcif
