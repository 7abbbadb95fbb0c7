#pragma once

// Random netlist generators for property tests and `pogc check --seed`.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pogc/netlist.hpp"

namespace pogc {

struct RandomNetlistConfig {
  int max_dynamic = 8;    // storage elements over the whole netlist
  int max_couplings = 2;  // so up to three domain segments
  int max_depth = 5;      // ladder level included
  int max_items = 4;      // ladder items per segment
};

class RandomNetlist {
 public:
  RandomNetlist(std::uint64_t seed, RandomNetlistConfig cfg = {}) : rng_(seed), cfg_(cfg) {}

  std::string generate() {
    os_.str({});
    os_.clear();
    counter_ = 0;
    dynamic_ = 0;
    names_.clear();
    node_ = 0;
    int couplings = uniform(0, cfg_.max_couplings);
    std::vector<Domain> doms;
    for (int k = 0; k <= couplings; ++k) doms.push_back(kDomains[static_cast<std::size_t>(uniform(0, 3))]);

    std::string cur = new_node();
    source("U", doms[0], cur);
    for (std::size_t k = 0; k < doms.size(); ++k) {
      int items = uniform(1, cfg_.max_items);
      bool last_series = false;
      for (int i = 0; i < items; ++i) {
        bool series = coin();
        last_series = series;
        if (series) {
          std::string next = new_node();
          network(doms[k], cur, next, cfg_.max_depth - 1);
          cur = next;
        } else {
          network(doms[k], cur, "gnd", cfg_.max_depth - 1);
        }
      }
      if (k + 1 < doms.size()) {
        std::string next = new_node();
        os_ << "cb K" << k + 1 << " " << (coin() ? "xfmr" : "gyr") << " " << domain_keyword(doms[k]) << "(" << cur << ",gnd) "
            << domain_keyword(doms[k + 1]) << "(" << next << ",gnd) " << value() << "\n";
        cur = next;
      } else if (coin()) {
        source("W", doms[k], cur);
      } else if (last_series) {
        network(doms[k], cur, "gnd", cfg_.max_depth - 1);  // close the open end
      }
    }
    int outs = uniform(0, 2);
    for (int i = 0; i < outs && !names_.empty(); ++i) {
      const auto& n = names_[static_cast<std::size_t>(uniform(0, static_cast<int>(names_.size()) - 1))];
      os_ << "out " << n << (coin() ? "" : (coin() ? ".across" : ".through")) << "\n";
    }
    return os_.str();
  }

  // Bridge between a, b, c and gnd with a source across a-gnd; never series-parallel.
  std::string wheatstone() {
    os_.str({});
    os_.clear();
    counter_ = 0;
    dynamic_ = 0;
    names_.clear();
    Domain d = kDomains[static_cast<std::size_t>(uniform(0, 3))];
    source("U", d, "a");
    element(d, "a", "b");
    element(d, "a", "c");
    element(d, "b", "gnd");
    element(d, "c", "gnd");
    element(d, "b", "c");
    return os_.str();
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  static constexpr std::array<Domain, 4> kDomains{Domain::electrical, Domain::mech_translational, Domain::mech_rotational,
                                                  Domain::hydraulic};

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }
  std::string new_node() { return "n" + std::to_string(++node_); }

  std::string value() {
    // Three significant digits across two decades.
    double v = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 1.0)(rng_));
    return format_real(std::round(v * 100.0) / 100.0 > 0 ? std::round(v * 100.0) / 100.0 : 0.1);
  }

  void source(const std::string& prefix, Domain d, const std::string& node) {
    bool across = coin();
    os_ << "src " << prefix << ++counter_ << " " << (across ? "across" : "through") << " " << domain_keyword(d) << " " << node
        << " gnd ";
    switch (uniform(0, 2)) {
      case 0: os_ << "const:" << value(); break;
      case 1: os_ << "step:" << value() << "@0"; break;
      default: os_ << "sin:" << value() << "," << value() << ",0"; break;
    }
    os_ << "\n";
  }

  void element(Domain d, const std::string& a, const std::string& b) {
    std::vector<const ElementTypeInfo*> pool;
    for (const auto& t : kElementTypes)
      if (t.domain == d && (t.kind == ElementKind::static_element || dynamic_ < cfg_.max_dynamic)) pool.push_back(&t);
    const ElementTypeInfo* t = pool[static_cast<std::size_t>(uniform(0, static_cast<int>(pool.size()) - 1))];
    if (t->kind != ElementKind::static_element) ++dynamic_;
    std::string name = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(t->keyword[0])))) +
                       std::to_string(++counter_);
    names_.push_back(name);
    // Some elements are declared backwards and turned around by a dir record.
    bool flip = uniform(0, 3) == 0;
    os_ << "el " << name << " " << t->keyword << " " << domain_keyword(d) << " " << (flip ? b : a) << " " << (flip ? a : b) << " "
        << value();
    if (t->kind == ElementKind::static_element && coin()) os_ << (coin() ? " impedance" : " admittance");
    os_ << "\n";
    if (flip) os_ << "dir " << name << " -\n";
  }

  // Two-terminal network from a to b.
  void network(Domain d, const std::string& a, const std::string& b, int depth) {
    int kind = depth <= 1 ? 0 : uniform(0, 4);  // leaf more likely
    if (kind <= 2) {
      element(d, a, b);
    } else if (kind == 3) {
      int parts = uniform(2, 3);
      std::string cur = a;
      for (int i = 0; i < parts; ++i) {
        std::string next = i + 1 == parts ? b : new_node();
        network(d, cur, next, depth - 1);
        cur = next;
      }
    } else {
      int parts = uniform(2, 3);
      for (int i = 0; i < parts; ++i) network(d, a, b, depth - 1);
    }
  }

  std::mt19937_64 rng_;
  RandomNetlistConfig cfg_;
  std::ostringstream os_;
  int counter_ = 0, dynamic_ = 0, node_ = 0;
  std::vector<std::string> names_;
};

}  // namespace pogc
