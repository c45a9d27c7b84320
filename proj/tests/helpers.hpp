#pragma once

#include <functional>

#include "cprt/error.hpp"

namespace testutil {

// True iff fn throws a cprt::Error carrying exactly the expected code.
inline bool raises(cprt::errc expected, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const cprt::Error& e) {
        return e.code() == expected;
    }
    return false;
}

} // namespace testutil
