#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace corf {

using WarningHandler = std::function<void(std::string_view)>;

/// Emit a non-fatal diagnostic. The default handler writes to stderr.
void warn(std::string_view message);

/// Replace the process-wide warning handler; returns the previous one.
/// Passing an empty function restores the stderr default.
WarningHandler set_warning_handler(WarningHandler handler);

/// Collects warnings for the lifetime of the object, restoring the previous
/// handler on destruction. Mainly used by tests and the pipeline report.
class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(std::string_view needle) const;

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace corf
