#include "nn2rules/error.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace nn2rules {

namespace {

std::mutex handler_mutex;

WarningHandler& handler() {
    static WarningHandler h = [](const std::string& message) {
        std::cerr << "warning: " << message << '\n';
    };
    return h;
}

} // namespace

WarningHandler set_warning_handler(WarningHandler handler_fn) {
    std::lock_guard lock(handler_mutex);
    return std::exchange(handler(), std::move(handler_fn));
}

void warn(const std::string& message) {
    std::lock_guard lock(handler_mutex);
    if (handler()) handler()(message);
}

} // namespace nn2rules
