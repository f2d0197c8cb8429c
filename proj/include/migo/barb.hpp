#pragma once

#include <set>
#include <string>
#include <vector>

#include "migo/ast.hpp"

namespace migo {

// Observability predicates shared by the process and type semantics:
// input a, output a-bar, sync [a], close request end-a, closed channel,
// and the buffer barbs of the asynchronous semantics.
struct Barb {
  enum class Kind { Input, Output, Sync, CloseReq, ClosedChan, BufSend, BufRecv };
  Kind kind;
  Name chan;

  bool operator<(const Barb& o) const {
    if (kind != o.kind) return kind < o.kind;
    return chan < o.chan;
  }
  bool operator==(const Barb& o) const { return kind == o.kind && chan == o.chan; }
};

std::string show_barb(const Barb& b);

struct BarbSet {
  std::set<Barb> singles;               // includes sync barbs
  std::set<std::vector<Barb>> multis;   // select/branch multi-barbs

  bool has(const Barb& b) const { return singles.count(b) > 0; }
  bool has_sync(const Name& a) const { return has({Barb::Kind::Sync, a}); }
};

} // namespace migo
