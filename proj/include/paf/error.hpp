// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace paf {

// Every failure the library can signal. Tests match on the code, not the text.
enum class errc {
    // topology
    duplicate_part,
    unknown_part_in_limb,
    self_loop,
    duplicate_limb,
    disconnected_graph,
    bad_topology_file,
    // fieldgen
    non_positive_sigma,
    degenerate_limb,
    empty_input,
    dim_mismatch,
    // associate
    coincident_candidates,
    bad_argument,
    // parse
    topology_field_mismatch,
    instance_too_large,
    // eval
    infeasible_spec,
    no_annotated_parts,
    empty_benchmark,
    // io
    io_error,
    bad_magic,
    version_unsupported,
    topology_hash_mismatch,
};

inline const char* to_string(errc c) {
    switch (c) {
        case errc::duplicate_part: return "duplicate_part";
        case errc::unknown_part_in_limb: return "unknown_part_in_limb";
        case errc::self_loop: return "self_loop";
        case errc::duplicate_limb: return "duplicate_limb";
        case errc::disconnected_graph: return "disconnected_graph";
        case errc::bad_topology_file: return "bad_topology_file";
        case errc::non_positive_sigma: return "non_positive_sigma";
        case errc::degenerate_limb: return "degenerate_limb";
        case errc::empty_input: return "empty_input";
        case errc::dim_mismatch: return "dim_mismatch";
        case errc::coincident_candidates: return "coincident_candidates";
        case errc::bad_argument: return "bad_argument";
        case errc::topology_field_mismatch: return "topology_field_mismatch";
        case errc::instance_too_large: return "instance_too_large";
        case errc::infeasible_spec: return "infeasible_spec";
        case errc::no_annotated_parts: return "no_annotated_parts";
        case errc::empty_benchmark: return "empty_benchmark";
        case errc::io_error: return "io_error";
        case errc::bad_magic: return "bad_magic";
        case errc::version_unsupported: return "version_unsupported";
        case errc::topology_hash_mismatch: return "topology_hash_mismatch";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

}  // namespace paf
