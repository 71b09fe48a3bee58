#pragma once

#include <cstdint>
#include <string>

namespace waiterplan {

/// Role of an indeterminate. Every set in the pipeline is a polynomial over
/// indeterminates in [-1,1]; the tag says what a variable physically stands
/// for so that slicing and sampling can address it.
enum class VarTag : uint8_t {
  time = 0,       ///< x_t of one time subinterval, index = interval
  parameter = 1,  ///< x_k of one joint's trajectory parameter, index = joint
  pos_error = 2,  ///< tracking position error of one joint
  vel_error = 3,  ///< tracking velocity error of one joint
  remainder = 4,  ///< independent generator (Taylor remainder, reduction, volume)
  inertial = 5,   ///< one uncertain inertial parameter
};

/// Globally unique indeterminate identifier (tag, index).
struct VarId {
  VarTag tag{VarTag::remainder};
  uint32_t index{0};

  constexpr uint64_t key() const {
    return (static_cast<uint64_t>(tag) << 32) | index;
  }
  friend bool operator==(VarId a, VarId b) { return a.key() == b.key(); }
  friend bool operator!=(VarId a, VarId b) { return a.key() != b.key(); }
  friend bool operator<(VarId a, VarId b) { return a.key() < b.key(); }
};

inline VarId time_var(uint32_t interval) { return {VarTag::time, interval}; }
inline VarId param_var(uint32_t joint) { return {VarTag::parameter, joint}; }
inline VarId pos_error_var(uint32_t joint) { return {VarTag::pos_error, joint}; }
inline VarId vel_error_var(uint32_t joint) { return {VarTag::vel_error, joint}; }
inline VarId inertial_var(uint32_t index) { return {VarTag::inertial, index}; }

std::string to_string(VarId id);

/// Allocator for fresh remainder indeterminates.
///
/// Remainder ids are (stream << 20) | sequence. Without an active scope the
/// allocation draws from a global atomic stream; a Scope pins the current
/// thread to a fixed stream with a local sequence, which keeps ids (and
/// therefore serialized dumps) identical no matter how per-interval work is
/// scheduled across threads.
class FreshVars {
 public:
  static VarId next();

  class Scope {
   public:
    explicit Scope(uint32_t stream);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    void* prev_;
  };

  /// Streams 0..kMaxUserStream-1 are for per-interval construction.
  static constexpr uint32_t kMaxUserStream = 0xFFC;
  /// Reserved stream for model-load-time allocations (link volumes).
  static constexpr uint32_t kModelStream = 0xFFD;
  /// Reserved stream backing the unscoped global allocator.
  static constexpr uint32_t kGlobalStream = 0xFFE;
};

}  // namespace waiterplan
