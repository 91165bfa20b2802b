#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace causabs {

using Setting = std::pair<std::string, std::string>;

// Y_{x} = y with possibly several outcome variables sharing one intervention.
struct Term {
    std::vector<Setting> outcome;
    std::vector<Setting> intervention;
    bool operator==(const Term&) const = default;
};

// P(terms | given); given empty means unconditional.
struct CtfQuery {
    std::vector<Term> terms;
    std::vector<Term> given;
    bool operator==(const CtfQuery&) const = default;
};

CtfQuery parse_query(std::string_view text);
std::string print_query(const CtfQuery& q);

// True when two interventions assign the same set of settings.
bool same_intervention(const std::vector<Setting>& a, const std::vector<Setting>& b);

} // namespace causabs
