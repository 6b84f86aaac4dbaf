#pragma once

#include <string>

#include "sltime/medium.hpp"

namespace sltime {

/// Parses the JSON stack description; throws ValidationError on malformed input
/// or invalid layers.
StackSpec parse_stack(const std::string& text);
/// Reads a stack file; a missing or unreadable file is a ValidationError naming the path.
StackSpec load_stack(const std::string& path);

std::string stack_to_json(const StackSpec& stack, int indent = 2);
void save_stack(const StackSpec& stack, const std::string& path);

}  // namespace sltime
