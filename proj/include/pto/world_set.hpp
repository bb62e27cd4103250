#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace pto {

inline constexpr std::size_t kMaxHypotheses = 64;

/// Set of world hypotheses as a bitmask; bit s set means hypothesis s is
/// in the set. The empty set means "valid nowhere".
class WorldSet {
 public:
  constexpr WorldSet() = default;
  constexpr explicit WorldSet(std::uint64_t mask) : mask_(mask) {}

  static constexpr WorldSet full(std::size_t hypotheses) {
    return WorldSet(hypotheses >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << hypotheses) - 1);
  }
  static constexpr WorldSet single(std::size_t s) { return WorldSet(std::uint64_t{1} << s); }

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(std::size_t s) const { return (mask_ >> s) & 1U; }
  constexpr bool subset_of(WorldSet o) const { return (mask_ & ~o.mask_) == 0; }
  constexpr bool intersects(WorldSet o) const { return (mask_ & o.mask_) != 0; }
  int count() const { return std::popcount(mask_); }

  constexpr WorldSet operator&(WorldSet o) const { return WorldSet(mask_ & o.mask_); }
  constexpr WorldSet operator|(WorldSet o) const { return WorldSet(mask_ | o.mask_); }
  constexpr WorldSet minus(WorldSet o) const { return WorldSet(mask_ & ~o.mask_); }
  constexpr WorldSet& operator&=(WorldSet o) { mask_ &= o.mask_; return *this; }
  constexpr WorldSet& operator|=(WorldSet o) { mask_ |= o.mask_; return *this; }
  constexpr bool operator==(const WorldSet&) const = default;

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::uint64_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::uint64_t m = mask_; m != 0; m &= m - 1) f(static_cast<std::size_t>(std::countr_zero(m)));
  }

  std::string to_string(std::size_t width) const {
    std::string s(width, '0');
    for (std::size_t i = 0; i < width; ++i) s[width - 1 - i] = contains(i) ? '1' : '0';
    return s;
  }

 private:
  std::uint64_t mask_ = 0;
};

}  // namespace pto
