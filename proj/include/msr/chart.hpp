// Charts: a named, ordered list of coordinate names.  The order is fixed at
// construction and defines the coframe dx_1..dx_m used everywhere else.
#pragma once

#include "msr/error.hpp"

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

namespace msr {

struct Chart {
    std::string name;
    std::vector<std::string> vars;

    std::size_t dim() const { return vars.size(); }

    // -1 when the name is not a coordinate of this chart.
    int index_of(const std::string& v) const {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == v) return static_cast<int>(i);
        return -1;
    }

    bool operator==(const Chart& o) const { return name == o.name && vars == o.vars; }
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::string name, std::vector<std::string> vars) {
    for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i] == vars[j])
                throw EngineError("chart '" + name + "' repeats variable '" + vars[i] + "'");
    return std::make_shared<const Chart>(Chart{std::move(name), std::move(vars)});
}

// Charts are usually shared by pointer; structural equality is the fallback
// so that independently built but identical charts interoperate.
inline bool same_chart(const ChartPtr& a, const ChartPtr& b) {
    if (a == b) return true;
    return a && b && *a == *b;
}

inline void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
    if (!same_chart(a, b)) throw EngineError("incompatible charts");
}

} // namespace msr
