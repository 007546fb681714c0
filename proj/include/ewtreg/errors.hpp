#pragma once

#include <stdexcept>

namespace ewtreg {

struct InfeasibleInsertion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotInRoute : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoPendingRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RequestAlreadyPending : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct LookaheadOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HorizonTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ewtreg
