#include "morph/module.hpp"

#include <array>
#include <utility>

namespace morph {

namespace {

constexpr std::array<std::pair<Mode, std::string_view>, 13> kModeNames{{
    {Mode::Sleep, "SLEEP"},
    {Mode::Search, "SEARCH"},
    {Mode::Seed, "SEED"},
    {Mode::Final, "FINAL"},
    {Mode::Node, "NODE"},
    {Mode::INode, "INODE"},
    {Mode::Fixed, "FIXED"},
    {Mode::Root, "ROOT"},
    {Mode::IRoot, "IROOT"},
    {Mode::ARoot, "AROOT"},
    {Mode::Disband, "DISBAND"},
    {Mode::Touch, "TOUCH"},
    {Mode::TouchSeed, "TOUCHSEED"},
}};

}  // namespace

std::string_view to_string(Mode m) {
  for (const auto& [mode, name] : kModeNames) {
    if (mode == m) return name;
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (const auto& [mode, n] : kModeNames) {
    if (n == name) return mode;
  }
  return std::nullopt;
}

}  // namespace morph
