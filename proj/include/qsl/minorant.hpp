#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "interval.hpp"
#include "polynomial.hpp"

namespace qsl {

template <class T>
struct ContactNode {
    T x;
    int m = 1;     // contact order: matched derivatives 0..m-1
    int kappa = 0; // set by the correction step
};

// Target: p(x) <= cos(x - theta) for x >= 0, with p carrying exponent scale s.
template <class T>
struct MinorantSpec {
    T theta{0};
    T s{1};
    std::vector<ContactNode<T>> nodes;
    std::uint64_t seed = 0;
};

enum class CertMethod { interval_subdivision, derivative_count };
enum class CertStatus { verified, refuted, inconclusive };

inline const char* to_string(CertMethod m)
{
    return m == CertMethod::interval_subdivision ? "interval_subdivision" : "derivative_count";
}

inline const char* to_string(CertStatus s)
{
    switch (s) {
    case CertStatus::verified: return "verified";
    case CertStatus::refuted: return "refuted";
    default: return "inconclusive";
    }
}

// A region where p > cos(x - theta), with a sampled point inside it.
template <class T>
struct Witness {
    Interval<T> region;
    T point;
    T difference; // cos(point - theta) - p(point), negative
};

template <class T>
struct RootCount {
    Interval<T> x;
    int bound = 0; // at most this many roots counted with multiplicity
};

template <class T>
struct MinorantCertificate {
    CertMethod method = CertMethod::interval_subdivision;
    CertStatus status = CertStatus::inconclusive;
    bool verified = false;
    std::vector<Interval<T>> contact_enclosures;
    T far_field_cutoff{0};
    std::optional<Witness<T>> negative_evidence;
    int precision_bits = 0;
    long subdivision_count = 0;
    std::uint64_t seed = 0;
    T domain_lower{0};
    // cos(x - theta) - p(x) >= -contact_tolerance is what was proven
    T contact_tolerance{0};
    // derivative count only
    int derivative_order = 0;
    std::optional<Interval<T>> window;
    std::vector<RootCount<T>> window_roots;
    long window_root_count = 0;
    std::string note;

    void set(CertStatus s)
    {
        status = s;
        verified = s == CertStatus::verified;
    }
};

} // namespace qsl
