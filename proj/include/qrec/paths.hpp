// Feynman path bookkeeping over measurement-basis branches.
//
// A virtual path picks one outcome per measurement. Its amplitude is the
// product of the evolution matrix elements between consecutive
// observations; paths are grouped by the outcomes of the retained records,
// amplitudes are added inside a group (the erased branches cannot be told
// apart) and probabilities across groups.

#pragma once

#include "qrec/distribution.hpp"
#include "qrec/scenario.hpp"

#include <string>
#include <vector>

namespace qrec {

struct Branch {
  std::size_t event;    // index into Scenario::events
  std::size_t outcome;  // index into that measurement's basis labels
};

struct VirtualPath {
  std::vector<Branch> branches;  // one per measurement, in event order
  Amplitude amplitude;

  bool is_zero(double tol = kStructuralTol) const { return std::abs(amplitude) <= tol; }
};

/// Amplitude of the path choosing `outcomes[k]` at the k-th measurement.
Amplitude path_amplitude(const std::vector<std::size_t>& outcomes, const Scenario& s);

/// Every element of the Cartesian product of the measurement label sets, in
/// lexicographic order (first measurement slowest). Zero-amplitude paths are
/// kept.
std::vector<VirtualPath> enumerate_paths(const Scenario& s);

/// Sums amplitudes over erased branches and probabilities over retained ones.
OutcomeDistribution reduce(const std::vector<VirtualPath>& paths, const Scenario& s);

inline OutcomeDistribution path_distribution(const Scenario& s) {
  return reduce(enumerate_paths(s), s);
}

std::string describe(const VirtualPath& p, const Scenario& s);

/// Layered network of distinguishable outcomes: one layer per retained
/// record in time order, edges between consecutive layers weighted by the
/// pairwise marginal probability.
struct RealPathGraph {
  struct Layer {
    std::string agent;
    std::vector<std::string> labels;
    std::vector<double> weights;  // single-layer marginal
  };
  struct Edge {
    std::size_t layer;  // edge runs from layers[layer] to layers[layer + 1]
    std::size_t from;
    std::size_t to;
    double weight;
    bool vanishing;
  };
  std::vector<Layer> layers;
  std::vector<Edge> edges;

  const Edge* find_edge(const std::string& from_label, const std::string& to_label) const;
};

RealPathGraph real_path_graph(const OutcomeDistribution& d);

}  // namespace qrec
