#pragma once

#include <string>
#include <vector>

namespace dspectra {

/// Per-assertion ledger: every report-producing operation records the named
/// comparisons it made, so a violated step names itself.
struct LedgerEntry {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    std::string relation;  // ">=", ">", "<", "<=", "==", "info"
    bool pass = true;
};

struct Ledger {
    std::vector<LedgerEntry> entries;

    void check(const std::string& name, double lhs, const std::string& rel, double rhs) {
        bool ok = true;
        if (rel == ">=") ok = lhs >= rhs;
        else if (rel == ">") ok = lhs > rhs;
        else if (rel == "<=") ok = lhs <= rhs;
        else if (rel == "<") ok = lhs < rhs;
        else if (rel == "==") ok = lhs == rhs;
        entries.push_back({name, lhs, rhs, rel, ok});
    }
    void info(const std::string& name, double value) {
        entries.push_back({name, value, 0, "info", true});
    }
    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

}  // namespace dspectra
