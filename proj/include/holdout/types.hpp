#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace holdout {

enum class Label { positive, negative };

enum class Censor { interior, at_lower_bound, at_upper_bound };

enum class Side { left, right };

enum class Region { interior, left_boundary, right_boundary };

enum class Klass { positive, negative, indeterminate };

// One instrument readout before any transformation.
struct RawReading {
    double total_igg = 0.0;     // MFI, >= 0
    double sars_igg_sum = 0.0;  // sum of the seven antigen channels, >= 0
    std::optional<Label> label;
};

// One readout in working coordinates: x, y in [0, 1].
struct Sample {
    double x = 0.0;
    double y = 0.0;
    Censor x_censor = Censor::interior;
    std::optional<Label> label;
};

inline Region region_of(Censor c) {
    switch (c) {
        case Censor::at_lower_bound: return Region::left_boundary;
        case Censor::at_upper_bound: return Region::right_boundary;
        default: return Region::interior;
    }
}

std::string_view to_string(Label l);
std::string_view to_string(Klass k);
std::string_view to_string(Region r);
std::string_view to_string(Censor c);

// "pos" / "neg" / "unknown"; anything else throws DataError.
std::optional<Label> parse_label(std::string_view s);
Klass parse_klass(std::string_view s);
Region parse_region(std::string_view s);

}  // namespace holdout
