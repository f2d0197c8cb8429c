#pragma once

#include <stdexcept>
#include <string>

#include "migo/ast.hpp"
#include "migo/types.hpp"

namespace migo {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" + std::to_string(col)),
        line(line),
        col(col) {}
};

// MiGo surface syntax:
//   def NAME(x:int, c:chan int, ...) = P ; ... in P
//   u!<e>; P   u?(x); P   tau; P   close u; P
//   select { pi1; P1 [] pi2; P2 }   if e then P else Q   if * then P else Q
//   new x:int[,n]; P   P | Q   0   X<e1, ..., u1, ...>
// Conditionals are marked left to right in text order, starting at 0.
Program parse_program(const std::string& text);

// Type-equation syntax, one equation per `t(x,y) = T` group:
//   send u; T   recv u; T   tau; T   oplus { T1, T2 }
//   branch { k1;T1 [] k2;T2 }   T | T   0   newchan a[,n]; T
//   end[u]; T   t<u,...>
// The entry equation t0() must be present.
TypeSystem parse_type_system(const std::string& text);

} // namespace migo
