#ifndef RAMAN_ECHO_DIAGNOSTICS_HPP
#define RAMAN_ECHO_DIAGNOSTICS_HPP

#include <functional>
#include <string>

namespace raman_echo {

using WarningHandler = std::function<void(const std::string&)>;

// Non-fatal diagnostics (adiabaticity, grid truncation, undecayed cavity
// field). The default handler writes to std::clog.
void warn(const std::string& message);

// Installs a handler and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

// Restores the previous handler on scope exit.
class ScopedWarningHandler {
public:
    explicit ScopedWarningHandler(WarningHandler handler)
        : previous_(set_warning_handler(std::move(handler))) {}
    ~ScopedWarningHandler() { set_warning_handler(std::move(previous_)); }
    ScopedWarningHandler(const ScopedWarningHandler&) = delete;
    ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

private:
    WarningHandler previous_;
};

} // namespace raman_echo

#endif // RAMAN_ECHO_DIAGNOSTICS_HPP
