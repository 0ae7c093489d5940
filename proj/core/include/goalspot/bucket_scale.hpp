#pragma once

namespace goalspot {

inline constexpr int kMinBucket = 1;
inline constexpr int kMaxBucket = 13;

/// Thirteen-point assessment scale. Adjacent buckets are separated by the
/// same likelihood ratio, so the mapping is geometric between pMin (bucket 1)
/// and pMax (bucket 13).
struct BucketScale {
    double pMin = 0.0;
    double pMax = 0.0;

    static constexpr double kDefaultPMax = 0.9;
    static constexpr double kDefaultRatio = 1.8;

    static BucketScale defaults();
    static BucketScale from_max_and_ratio(double pMax, double ratio);

    double ratio() const;
    bool valid() const { return 0.0 < pMin && pMin < pMax && pMax < 1.0; }

    bool operator==(const BucketScale&) const = default;
};

/// Probability for bucket `b` in [1, 13]. Throws DomainError otherwise.
double bucket_to_probability(int b, const BucketScale& scale);

}  // namespace goalspot
