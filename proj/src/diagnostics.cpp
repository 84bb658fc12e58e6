#include "raman_echo/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace raman_echo {

namespace {

std::mutex handler_mutex;

WarningHandler& handler_slot()
{
    static WarningHandler handler = [](const std::string& message) {
        std::clog << "warning: " << message << '\n';
    };
    return handler;
}

} // namespace

void warn(const std::string& message)
{
    std::lock_guard lock(handler_mutex);
    if (handler_slot()) {
        handler_slot()(message);
    }
}

WarningHandler set_warning_handler(WarningHandler handler)
{
    std::lock_guard lock(handler_mutex);
    WarningHandler previous = std::move(handler_slot());
    handler_slot() = std::move(handler);
    return previous;
}

} // namespace raman_echo
