#pragma once

#include <string>
#include <vector>

#include "causabs/scm.hpp"

namespace causabs {

// Compiles an integer expression over named inputs into an exhaustive table,
// row-major over `inputs` (first most significant). Each input value is read as
// its integer spelling when it has one, otherwise as its domain index. The result
// must spell a value of `output`.
//
// Operators: or || | xor ^ and && & not ! == != < <= > >= + - * / %
// Functions: ite(c, a, b), ind(e), min(a, b), max(a, b), abs(a)
std::vector<int> compile_expression(const std::string& expr, const std::vector<Variable>& inputs,
                                    const Domain& output);

} // namespace causabs
