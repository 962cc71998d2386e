#include "qreflect/rational.hpp"

#include "qreflect/errors.hpp"

namespace qreflect {

Rat rat_parse(const std::string& text) {
    if (text.empty()) throw UserError("empty rational literal");
    for (char ch : text) {
        if (!(ch == '-' || ch == '+' || ch == '/' || (ch >= '0' && ch <= '9')))
            throw UserError("malformed rational literal: " + text);
    }
    mpq_class r;
    if (r.set_str(text, 10) != 0) throw UserError("malformed rational literal: " + text);
    if (r.get_den() == 0) throw UserError("zero denominator in rational literal: " + text);
    r.canonicalize();
    return r;
}

std::string rat_str(const Rat& r) {
    return r.get_str();
}

bool rat_is_integer(const Rat& r) {
    return r.get_den() == 1;
}

long rat_to_long(const Rat& r) {
    if (!rat_is_integer(r) || !r.get_num().fits_slong_p())
        throw UserError("value is not a small integer: " + r.get_str());
    return r.get_num().get_si();
}

Rat rat_pow(const Rat& base, long e) {
    if (e < 0) {
        if (base == 0) throw UserError("negative power of zero");
        return rat_pow(Rat(1) / base, -e);
    }
    Rat acc(1), b = base;
    while (e) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

} // namespace qreflect
