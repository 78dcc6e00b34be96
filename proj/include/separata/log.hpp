#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace separata {

/// 0 silent, 1 info, 2 debug, 3 trace. Read once from SEPARATA_LOG
/// (a number or one of: off, info, debug, trace).
inline int log_level() {
  static const int level = [] {
    const char* v = std::getenv("SEPARATA_LOG");
    if (!v || !*v) return 0;
    std::string s(v);
    if (s == "off") return 0;
    if (s == "info") return 1;
    if (s == "debug") return 2;
    if (s == "trace") return 3;
    return std::atoi(v);
  }();
  return level;
}

#define SEPARATA_LOG(lvl, expr)                             \
  do {                                                      \
    if (::separata::log_level() >= (lvl)) {                 \
      std::cerr << "[separata] " << expr << '\n';           \
    }                                                       \
  } while (0)

}  // namespace separata
