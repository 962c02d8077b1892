// Builtin scenarios: the worked examples shipped with the engine, embedded
// so the CLI can run them without touching the filesystem.  The same sources
// live under scenarios/ for reading and for `msr run`; a unit test keeps the
// two copies byte-identical.
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace msr {

inline const std::vector<std::pair<std::string, std::string>>& builtin_scenarios() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"cross2d",
         R"msr(# The coordinate cross xy = 0 in the symplectic plane, carried by the
# scaling action.  The reduced algebra keeps one nilpotent direction.
chart (x, y)
omega = d(x)^d(y) degree 1
field scale = x*e(x) + y*e(y)
action (scale)
constraints (x*y)
sample (1, x*y, (x*y)^2, x^2*y)

check nondegenerate expect yes
check action
check form d(x*y) == y*d(x) + x*d(y)
check tangent scale
check tangent x*e(x)
check not tangent e(x)
check reducible form d(x)^d(y)
check reducible observable x*y
check not reducible observable x
check reducible observable x^2*y
check vanishing observable (x*y)^2
check not vanishing observable x*y
check member x*y
check not member x
check first-class x*y
check not first-class x + y
check casimir (x*y)^2
check not casimir x + y
reduce observable x*y
reduce observable (x*y)^2
reduce equal 1 + x*y, 1 + x*y + (x*y)^2
reduce not equal 1, x*y
reduced-basis degree = 4 expect (1, x*y)
check descent (1, x*y, (x*y)^2, x^2*y, x^2*y^2)
check closure
jacobi arity = 3
)msr"},
        {"scalarfield2d",
         R"msr(# Two-dimensional scalar field theory on the multimomentum chart
# (s1, s2, q, p, p1, p2).  The deformation q -> q + t*q^2 acts through its
# prolongation; fundamental fields follow the exp(-t) convention, so the
# generator of the action is -V.
chart (s1, s2, q, p, p1, p2)
fibration base (s1, s2, q) section (s1, s2)
form theta = p*d(s1)^d(s2) + p1*d(s1)^d(q) + p2*d(s2)^d(q)
potential = theta degree 2
field V = q^2*e(q) - 2*q*(p1*e(p1) + p2*e(p2))
action (-V)
moment from potential

# the vanishing ideal of the moment zero locus
constraints (q*p1, q*p2)

observable OV = canonical(prolong(q^2*e(q)))
observable W1 = canonical(prolong(e(s1)))
observable WQ = canonical(prolong(q*e(q)))
observable WQ3 = canonical(prolong(q^3*e(q)))
sample (OV, W1, WQ, WQ3)

check nondegenerate expect yes
check action
check moment
check field prolong(q^2*e(q)) == V
check form iota(-V, theta) == q^2*(p1*d(s1) + p2*d(s2))
check tangent -V
check reducible observable OV
check vanishing observable OV
check reducible observable W1
check not vanishing observable W1
check reducible observable WQ
check not vanishing observable WQ
check vanishing observable WQ3
check not reducible observable canonical(prolong(e(q)))
reduce observable OV
reduce observable WQ
reduced-basis from sample expect (W1, WQ)
check closure
jacobi arity = 4
)msr"},
        {"multicotangent",
         R"msr(# Degree-two multimomenta over three-space: the multicotangent analogue of
# a cotangent bundle, with no symmetry and no constraints.
chart (e1, e2, e3, p12, p13, p23)
fibration base (e1, e2, e3) section ()
form theta = p12*d(e1)^d(e2) + p13*d(e1)^d(e3) + p23*d(e2)^d(e3)
potential = theta degree 2
action ()
constraints ()

observable T1 = canonical(prolong(e(e1)))
observable T2 = canonical(prolong(e(e2)))
observable S1 = canonical(prolong(e1*e(e1)))
sample (T1, T2, S1)

check nondegenerate expect yes
check field prolong(e1*e(e1)) == e1*e(e1) - p12*e(p12) - p13*e(p13)
check tangent e(e1)
check reducible observable T1
check reducible observable S1
reduce observable S1
check closure
jacobi arity = 4
)msr"},
        {"symplectic_r2",
         R"msr(# The plane with its standard area form, reduced along the rotation action
# at the zero level of the angular moment.
chart (x, y)
form theta = (x*d(y) - y*d(x))/2
potential = theta degree 1
action (x*e(y) - y*e(x))
moment from potential
constraints from moment
sample ((x^2 + y^2)/2, 1)

check nondegenerate expect yes
check action
check moment
check member x^2 + y^2
check not member x
check reducible observable (x^2 + y^2)/2
check vanishing observable (x^2 + y^2)/2
check first-class x^2 + y^2
check not casimir x^2 + y^2
check casimir (x^2 + y^2)^2
reduce observable (x^2 + y^2)/2
reduce equal 1, 1 + x^2 + y^2
check descent (1, x^2 + y^2, (x^2 + y^2)^2)
check closure
jacobi arity = 3
)msr"},
    };
    return table;
}

inline const std::string* find_builtin(const std::string& name) {
    for (const auto& [nm, src] : builtin_scenarios())
        if (nm == name) return &src;
    return nullptr;
}

} // namespace msr
