#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "separata/formula.hpp"
#include "separata/frame_axioms.hpp"
#include "separata/labels.hpp"

namespace separata {

using World = std::size_t;

/// Finite frame (H, R, e) with a valuation and an optional label mapping.
struct KripkeModel {
  std::vector<std::string> worlds;
  World epsilon = 0;
  std::set<std::array<World, 3>> rel;
  std::map<std::string, std::set<World>> valuation;
  std::map<Label, World> rho;

  std::size_t size() const { return worlds.size(); }
  bool related(World a, World b, World c) const { return rel.count({a, b, c}) != 0; }
  /// Throws UnknownWorld.
  World world(const std::string& name) const;
  /// Checks the structural invariants; throws std::invalid_argument.
  void validate() const;
};

class UnknownWorld : public std::out_of_range {
 public:
  explicit UnknownWorld(const std::string& w) : std::out_of_range("unknown world " + w) {}
};

class UnmappedLabel : public std::out_of_range {
 public:
  explicit UnmappedLabel(Label l) : std::out_of_range("label " + label_name(l) + " has no world") {}
};

class CapExceeded : public std::runtime_error {
 public:
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

class ModelFormatError : public std::runtime_error {
 public:
  explicit ModelFormatError(const std::string& what) : std::runtime_error("bad model: " + what) {}
};

/// Forcing relation at one world.
bool eval(const KripkeModel& m, World h, const Formula& f);
/// Truth value of f at every world.
std::vector<bool> eval_all(const KripkeModel& m, const Formula& f);

struct FrameViolation {
  std::string axiom;
  /// Universal variable -> world name.
  std::map<std::string, std::string> witness;
};

std::string to_string(const FrameViolation& v);

/// First-order check of each axiom over H. Reports at most `per_axiom`
/// witnesses per axiom.
std::vector<FrameViolation> check_frame(const KripkeModel& m, const std::vector<FrameAxiom>& axioms,
                                        std::size_t per_axiom = 1);

/// True when every antecedent holds and every succedent fails under m.rho. Throws UnmappedLabel.
bool falsifiable(const KripkeModel& m, const Sequent& s);

// Concrete models -----------------------------------------------------------

/// Heaps over `locations` cells holding one of `values` values; R is
/// disjoint union. Throws CapExceeded if the frame would exceed `cap` worlds.
KripkeModel heap_frame(int locations, int values, std::size_t cap = 256);

/// Calls fn for each valuation of `atoms` over the heap frame: all of them
/// when samples == 0 (CapExceeded above `cap` valuations), otherwise
/// `samples` seeded random ones.
void for_each_heap_model(int locations, int values, const std::vector<std::string>& atoms, std::size_t samples,
                         std::uint64_t seed, const std::function<void(const KripkeModel&)>& fn,
                         std::size_t cap = 1u << 16);
std::vector<KripkeModel> enumerate_heap_models(int locations, int values, const std::vector<std::string>& atoms,
                                               std::size_t samples = 0, std::uint64_t seed = 0,
                                               std::size_t cap = 1u << 12);

/// Total or partial monoid from a Cayley table; -1 marks undefined.
KripkeModel make_monoid(const std::vector<std::vector<int>>& table, World unit,
                        std::vector<std::string> names = {});
/// Integers modulo n under addition.
KripkeModel z_mod(int n);
/// Fractional permissions on one location: shares k/denominator, summing
/// while the total stays at most one whole.
KripkeModel fractional_permissions(int denominator = 4);

// JSON ----------------------------------------------------------------------

std::string model_to_json(const KripkeModel& m, int indent = 2);
/// Throws ModelFormatError.
KripkeModel model_from_json(const std::string& text);

}  // namespace separata
