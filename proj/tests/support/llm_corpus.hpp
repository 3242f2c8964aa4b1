#pragma once

// Malformed model replies and the error class each must raise. The instance
// they are parsed against has generators g1, g2, g3, T = 6 and k_cap = 2.

#include <string>
#include <vector>

namespace ucr::corpus {

enum class Expect { parse, schema, semantic };

struct Case {
    std::string name;
    std::string text;
    Expect expect;
};

inline const std::vector<Case>& adversarial_replies() {
    static const std::vector<Case> cases = {
        {"prose prefix", R"(Sure! [[1,"g1",1]])", Expect::parse},
        {"prose suffix", R"([[1,"g1",1]] Hope this helps.)", Expect::parse},
        {"markdown fence", "```json\n[[1,\"g1\",1]]\n```", Expect::parse},
        {"truncated array", R"([[1,"g1",1],[2,"g2")", Expect::parse},
        {"single quotes", R"([[1,'g1',1]])", Expect::parse},
        {"trailing comma", R"([[1,"g1",1],])", Expect::parse},
        {"empty reply", "", Expect::parse},
        {"object instead of array", R"({"t":1,"g":"g1","u":1})", Expect::schema},
        {"two-element tuple", R"([[1,"g1"]])", Expect::schema},
        {"four-element tuple", R"([[1,"g1",1,0]])", Expect::schema},
        {"flat array", R"([1,"g1",1])", Expect::schema},
        {"hour as string", R"([["1","g1",1]])", Expect::schema},
        {"fractional hour", R"([[1.5,"g1",1]])", Expect::schema},
        {"generator as number", R"([[1,1,1]])", Expect::schema},
        {"status as bool", R"([[1,"g1",true]])", Expect::schema},
        {"unknown generator", R"([[1,"g9",1]])", Expect::semantic},
        {"hour zero", R"([[0,"g1",1]])", Expect::semantic},
        {"hour past horizon", R"([[7,"g1",1]])", Expect::semantic},
        {"status two", R"([[1,"g1",2]])", Expect::semantic},
        {"duplicate cell", R"([[1,"g1",1],[1,"g1",0]])", Expect::semantic},
        {"cap exceeded", R"([[2,"g1",1],[2,"g2",1],[2,"g3",0]])", Expect::semantic},
    };
    return cases;
}

}  // namespace ucr::corpus
