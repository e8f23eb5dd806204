#pragma once

#include <string>
#include <vector>

#include "nplcs/model.hpp"

namespace nplcs {

/// Six-location running example over one channel and messages {a,b,c}.
/// Locations 3 and 6 carry internal self-loops so no location is terminal.
inline Nplcs run6_fixture(Rat tau = Rat(1, 2)) {
    LcsSpec spec;
    spec.locations = {"1", "2", "3", "4", "5", "6"};
    spec.channels = {"c"};
    spec.messages = {"a", "b", "c"};
    auto snd = [](std::string s, std::string t, std::string m) {
        return RuleSpec{std::move(s), std::move(t), OpKind::Send, "c", std::move(m)};
    };
    auto rcv = [](std::string s, std::string t, std::string m) {
        return RuleSpec{std::move(s), std::move(t), OpKind::Recv, "c", std::move(m)};
    };
    auto nop = [](std::string s, std::string t) {
        return RuleSpec{std::move(s), std::move(t), OpKind::Internal, "", ""};
    };
    spec.rules = {
        snd("1", "2", "a"),  // r0
        rcv("1", "2", "b"),  // r1
        snd("2", "2", "b"),  // r2
        snd("2", "1", "c"),  // r3
        rcv("2", "6", "a"),  // r4
        rcv("2", "3", "c"),  // r5
        nop("3", "3"),       // r6
        snd("4", "4", "b"),  // r7
        rcv("4", "5", "b"),  // r8
        snd("5", "4", "b"),  // r9
        rcv("5", "6", "b"),  // r10
        nop("6", "6"),       // r11
    };
    return Nplcs(Lcs::build(spec), std::move(tau));
}

/// Channel-cleaning gadget over message alphabet `alphabet` plus a fresh "$".
/// Entering at `in` with arbitrary content, the only way to reach `out` is
/// with an empty channel, and some scheduler reaches (out, eps) almost surely.
inline Nplcs gadget_fixture(const std::vector<std::string>& alphabet, Rat tau = Rat(1, 2)) {
    if (alphabet.empty())
        throw std::invalid_argument("gadget needs a nonempty message alphabet");
    for (const std::string& m : alphabet)
        if (m == "$") throw std::invalid_argument("gadget reserves the message $");
    std::string a = *std::min_element(alphabet.begin(), alphabet.end());

    LcsSpec spec;
    spec.locations = {"in", "1", "2", "3", "out"};
    spec.channels = {"c"};
    spec.messages = alphabet;
    spec.messages.push_back("$");
    auto snd = [](std::string s, std::string t, std::string m) {
        return RuleSpec{std::move(s), std::move(t), OpKind::Send, "c", std::move(m)};
    };
    auto rcv = [](std::string s, std::string t, std::string m) {
        return RuleSpec{std::move(s), std::move(t), OpKind::Recv, "c", std::move(m)};
    };
    spec.rules.push_back(snd("in", "1", "$"));
    spec.rules.push_back(rcv("1", "out", "$"));
    spec.rules.push_back({"1", "2", OpKind::Internal, "", ""});
    for (const std::string& m : alphabet) spec.rules.push_back(rcv("2", "2", m));
    spec.rules.push_back(snd("2", "2", "$"));
    spec.rules.push_back(rcv("2", "3", "$"));
    spec.rules.push_back(rcv("3", "3", "$"));
    spec.rules.push_back(snd("3", "3", a));
    spec.rules.push_back(rcv("3", "in", a));
    spec.rules.push_back({"out", "out", OpKind::Internal, "", ""});
    return Nplcs(Lcs::build(spec), std::move(tau));
}

}  // namespace nplcs
