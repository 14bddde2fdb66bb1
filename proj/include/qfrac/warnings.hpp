#pragma once

#include <string>
#include <vector>

namespace qfrac {

// Accuracy flags accumulated through an evaluation; never fatal.
struct Warnings {
    bool endpoint_buffer = false;
    bool fd_fallback = false;
    bool singular_cell = false;
    bool near_boundary = false;
    bool singular_point_ignored = false;

    void merge(const Warnings& o) {
        endpoint_buffer |= o.endpoint_buffer;
        fd_fallback |= o.fd_fallback;
        singular_cell |= o.singular_cell;
        near_boundary |= o.near_boundary;
        singular_point_ignored |= o.singular_point_ignored;
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> out;
        if (endpoint_buffer) out.emplace_back("endpoint_buffer");
        if (fd_fallback) out.emplace_back("fd_fallback");
        if (singular_cell) out.emplace_back("singular_cell");
        if (near_boundary) out.emplace_back("near_boundary");
        if (singular_point_ignored) out.emplace_back("singular_point_ignored");
        return out;
    }
};

}  // namespace qfrac
