#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace housegan {

/// Room categories. The numeric code is the one-hot position and is part of
/// every serialized format, so the order must never change.
enum class RoomType : int {
  kLivingRoom = 0,
  kKitchen = 1,
  kBedroom = 2,
  kBathroom = 3,
  kCloset = 4,
  kBalcony = 5,
  kCorridor = 6,
  kDiningRoom = 7,
  kLaundryRoom = 8,
  kUnknown = 9,
};

inline constexpr int kNumRoomTypes = 10;

inline constexpr std::array<std::string_view, kNumRoomTypes> kRoomTypeNames = {
    "living room", "kitchen",     "bedroom",      "bathroom", "closet",
    "balcony",     "corridor",    "dining room",  "laundry room", "unknown"};

using OneHot = std::array<double, kNumRoomTypes>;

constexpr int code(RoomType type) { return static_cast<int>(type); }

constexpr bool is_valid_room_code(int value) {
  return value >= 0 && value < kNumRoomTypes;
}

inline RoomType room_type_from_code(int value) {
  if (!is_valid_room_code(value)) {
    throw std::out_of_range("room type code out of range: " +
                            std::to_string(value));
  }
  return static_cast<RoomType>(value);
}

constexpr std::string_view room_type_name(RoomType type) {
  return kRoomTypeNames[static_cast<std::size_t>(code(type))];
}

constexpr OneHot one_hot(RoomType type) {
  OneHot v{};
  v[static_cast<std::size_t>(code(type))] = 1.0;
  return v;
}

}  // namespace housegan
