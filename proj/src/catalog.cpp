#include "insitu/catalog.hpp"

#include <algorithm>

#include "embedded.hpp"

namespace insitu {

const std::vector<Design>& list_builtin() {
    static const std::vector<Design> designs = [] {
        std::vector<Design> out;
        for (const auto& [name, text] : embedded::designs()) {
            out.push_back(parse_design(DesignSource{std::string(text), std::string(name)}));
        }
        std::sort(out.begin(), out.end(),
                  [](const Design& a, const Design& b) { return a.id < b.id; });
        return out;
    }();
    return designs;
}

const Design& builtin_design(std::string_view id) {
    for (const auto& d : list_builtin()) {
        if (d.id == id) return d;
    }
    throw Error(ErrorCode::UnknownDesign, "no built-in design '" + std::string(id) + "'");
}

DesignSource builtin_source(std::string_view id) {
    for (const auto& [name, text] : embedded::designs()) {
        if (name == id) return {std::string(text), std::string(name)};
    }
    throw Error(ErrorCode::UnknownDesign, "no built-in design '" + std::string(id) + "'");
}

}  // namespace insitu
