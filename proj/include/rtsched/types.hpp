#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>

namespace rtsched {

using Tick = std::int64_t;
using Rat = boost::rational<std::int64_t>;

inline constexpr Tick kDefaultHorizonCap = 1'000'000;

enum class ErrorKind {
  Infeasible,    // a task (or split remainder) cannot be placed
  Unsplittable,  // no valid two-way split for the candidate pair
  CapExceeded,   // hyperperiod / horizon / sweep size above the configured cap
  Generation,    // task-set generator exhausted its retry budget
  Parse,         // malformed input document or flag value
  Validation,    // invariant violation in otherwise well-formed input
  Usage,         // operation invoked with an unsupported mode/arguments
  Bookkeeping,   // internal registry inconsistency (e.g. unknown job)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// "n" when the denominator is 1, "num/den" otherwise.
std::string to_string(const Rat& r);

// Accepts "a/b", plain integers, and decimal strings with at most 6 places.
Rat parse_rational(const std::string& text);

inline Tick floor_rat(const Rat& r) {
  Tick q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

inline Tick ceil_rat(const Rat& r) {
  Tick q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() > 0) ++q;
  return q;
}

// Identity of one job instance. part: 0 = whole task, 1/2 = split halves.
struct JobKey {
  int task_id = 0;
  Tick index = 0;
  int part = 0;

  auto tie() const { return std::tie(task_id, index, part); }
  bool operator==(const JobKey& o) const { return tie() == o.tie(); }
  bool operator!=(const JobKey& o) const { return tie() != o.tie(); }
  bool operator<(const JobKey& o) const { return tie() < o.tie(); }
};

// Half-open tick interval [start, end).
struct Interval {
  Tick start = 0;
  Tick end = 0;

  Tick length() const { return end - start; }
  bool contains(Tick t) const { return start <= t && t < end; }
  bool overlaps(const Interval& o) const {
    return start < o.end && o.start < end;
  }
  bool operator==(const Interval& o) const {
    return start == o.start && end == o.end;
  }
};

enum class Copy { Primary, Backup };

}  // namespace rtsched
