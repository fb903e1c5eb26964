#include "qrec/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qrec {

OutcomeDistribution::OutcomeDistribution(std::vector<Axis> axes,
                                         std::vector<std::string> erased_agents,
                                         std::string regime_tag)
    : axes_(std::move(axes)), erased_(std::move(erased_agents)), regime_tag_(std::move(regime_tag)) {
  std::size_t n = 1;
  for (const auto& axis : axes_) {
    if (axis.labels.empty()) throw std::invalid_argument("outcome axis without labels");
    n *= axis.labels.size();
  }
  weights_.assign(n, 0.0);
}

std::vector<std::size_t> OutcomeDistribution::digits(std::size_t flat) const {
  std::vector<std::size_t> out(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    out[k] = flat % axes_[k].labels.size();
    flat /= axes_[k].labels.size();
  }
  return out;
}

std::size_t OutcomeDistribution::flat_index(const std::vector<std::size_t>& digits) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) flat = flat * axes_[k].labels.size() + digits[k];
  return flat;
}

OutcomeTuple OutcomeDistribution::tuple(std::size_t flat) const {
  const auto d = digits(flat);
  OutcomeTuple t;
  t.reserve(axes_.size());
  for (std::size_t k = 0; k < axes_.size(); ++k) t.emplace_back(axes_[k].agent, axes_[k].labels[d[k]]);
  return t;
}

std::optional<std::size_t> OutcomeDistribution::axis_of(const std::string& agent) const {
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (axes_[k].agent == agent) return k;
  return std::nullopt;
}

bool OutcomeDistribution::is_erased(const std::string& agent) const {
  return std::find(erased_.begin(), erased_.end(), agent) != erased_.end();
}

double OutcomeDistribution::probability(const OutcomeTuple& t) const {
  if (t.size() != axes_.size()) throw std::out_of_range("tuple does not cover every retained record");
  std::vector<std::size_t> d(axes_.size());
  for (const auto& [agent, label] : t) {
    const auto axis = axis_of(agent);
    if (!axis) throw std::out_of_range("unknown agent '" + agent + "'");
    const auto& labels = axes_[*axis].labels;
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw std::out_of_range("unknown label '" + label + "'");
    d[*axis] = static_cast<std::size_t>(it - labels.begin());
  }
  return weights_[flat_index(d)];
}

double OutcomeDistribution::total() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

void OutcomeDistribution::clamp(double tol) {
  for (double& w : weights_)
    if (std::abs(w) <= tol) w = 0.0;
}

namespace {

std::size_t require_axis(const OutcomeDistribution& d, const std::string& agent) {
  if (d.is_erased(agent)) throw ErasedRecordError(agent);
  const auto axis = d.axis_of(agent);
  if (!axis) throw std::out_of_range("unknown agent '" + agent + "'");
  return *axis;
}

std::size_t require_label(const OutcomeDistribution& d, std::size_t axis, const std::string& label) {
  const auto& labels = d.axes()[axis].labels;
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end())
    throw std::out_of_range("agent '" + d.axes()[axis].agent + "' has no outcome '" + label + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

}  // namespace

OutcomeDistribution marginal(const OutcomeDistribution& d, const std::set<std::string>& keep) {
  std::vector<std::size_t> kept;
  for (const auto& agent : keep) require_axis(d, agent);
  std::vector<OutcomeDistribution::Axis> axes;
  for (std::size_t k = 0; k < d.axes().size(); ++k) {
    if (keep.count(d.axes()[k].agent)) {
      kept.push_back(k);
      axes.push_back(d.axes()[k]);
    }
  }
  OutcomeDistribution out(std::move(axes), d.erased_agents(), d.regime_tag());
  std::vector<std::size_t> sub(kept.size());
  for (std::size_t flat = 0; flat < d.size(); ++flat) {
    const auto digits = d.digits(flat);
    for (std::size_t k = 0; k < kept.size(); ++k) sub[k] = digits[kept[k]];
    out.add_weight(out.flat_index(sub), d.weight(flat));
  }
  return out;
}

ImplicationResult implication(const OutcomeDistribution& d, const OutcomeRef& given,
                              const OutcomeRef& then, double tol) {
  const std::size_t given_axis = require_axis(d, given.agent);
  const std::size_t then_axis = require_axis(d, then.agent);
  const std::size_t given_label = require_label(d, given_axis, given.label);
  const std::size_t then_label = require_label(d, then_axis, then.label);
  double counter = 0.0;
  for (std::size_t flat = 0; flat < d.size(); ++flat) {
    const auto digits = d.digits(flat);
    if (digits[given_axis] == given_label && digits[then_axis] != then_label)
      counter += d.weight(flat);
  }
  if (counter <= tol) return ImplicationHolds{};
  return ImplicationFails{counter};
}

double max_abs_difference(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  if (a.axes().size() != b.axes().size())
    throw std::invalid_argument("distributions have different outcome axes");
  for (std::size_t k = 0; k < a.axes().size(); ++k) {
    if (a.axes()[k].agent != b.axes()[k].agent || a.axes()[k].labels != b.axes()[k].labels)
      throw std::invalid_argument("distributions have different outcome axes");
  }
  double worst = 0.0;
  for (std::size_t flat = 0; flat < a.size(); ++flat)
    worst = std::max(worst, std::abs(a.weight(flat) - b.weight(flat)));
  return worst;
}

}  // namespace qrec
