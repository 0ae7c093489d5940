#include "goalspot/bucket_scale.hpp"

#include <cmath>
#include <string>

#include "goalspot/errors.hpp"

namespace goalspot {

BucketScale BucketScale::defaults() { return from_max_and_ratio(kDefaultPMax, kDefaultRatio); }

BucketScale BucketScale::from_max_and_ratio(double pMax, double ratio) {
    return BucketScale{pMax / std::pow(ratio, kMaxBucket - kMinBucket), pMax};
}

double BucketScale::ratio() const { return std::pow(pMax / pMin, 1.0 / (kMaxBucket - kMinBucket)); }

double bucket_to_probability(int b, const BucketScale& scale) {
    if (b < kMinBucket || b > kMaxBucket) {
        throw DomainError("bucket " + std::to_string(b) + " outside 1..13");
    }
    if (!scale.valid()) throw DomainError("invalid bucket scale");
    if (b == kMinBucket) return scale.pMin;
    if (b == kMaxBucket) return scale.pMax;
    return scale.pMax * std::pow(scale.ratio(), b - kMaxBucket);
}

}  // namespace goalspot
