#include "mpcomm/format.hpp"

#include <cstdio>

namespace mpcomm {

namespace {

std::string print(const char* spec, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

}  // namespace

std::string fmt9(double x) { return print("%.9g", x); }
std::string fmt17(double x) { return print("%.17g", x); }

}  // namespace mpcomm
