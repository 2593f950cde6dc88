#pragma once

#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fdms/error.hpp"
#include "fdms/hand_model.hpp"
#include "fdms/joint_subset.hpp"

namespace fdms {

// Movement units in XYZ-notation: one symbol per finger, thumb to pinky.
// X, Y and Z name distinct motion groups, O marks a motionless finger.

inline constexpr std::size_t kUnitLength = 5;

enum class Motion : char { X = 'X', Y = 'Y', Z = 'Z', O = 'O' };
enum class Function : char { M = 'M', F = 'F' };

class MovementUnit {
public:
    /// Validates symbols and the canonical ordering: the first mover is X,
    /// Y appears only after X, Z only after X and Y.
    static MovementUnit parse(std::string_view text)
    {
        require(text.size() == kUnitLength, ErrorCode::InvalidSymbol,
                "movement unit must have 5 symbols, got '" + std::string(text) + "'");
        std::array<Motion, kUnitLength> symbols{};
        for (std::size_t i = 0; i < kUnitLength; ++i) {
            const char c = text[i];
            require(c == 'X' || c == 'Y' || c == 'Z' || c == 'O', ErrorCode::InvalidSymbol,
                    "invalid symbol '" + std::string(1, c) + "' in movement unit '" + std::string(text) + "'");
            symbols[i] = static_cast<Motion>(c);
        }
        bool seen_x = false, seen_y = false;
        for (auto s : symbols) {
            switch (s) {
            case Motion::X: seen_x = true; break;
            case Motion::Y:
                require(seen_x, ErrorCode::NonCanonical, "'" + std::string(text) + "': Y before any X");
                seen_y = true;
                break;
            case Motion::Z:
                require(seen_x && seen_y, ErrorCode::NonCanonical, "'" + std::string(text) + "': Z before X and Y");
                break;
            case Motion::O: break;
            }
        }
        return MovementUnit(symbols);
    }

    const std::array<Motion, kUnitLength>& symbols() const noexcept { return symbols_; }
    Motion operator[](std::size_t finger) const { return symbols_[finger]; }

    /// Distinct motion symbols present, in X, Y, Z order.
    std::vector<Motion> groups() const
    {
        std::vector<Motion> out;
        for (auto m : {Motion::X, Motion::Y, Motion::Z})
            for (auto s : symbols_)
                if (s == m) {
                    out.push_back(m);
                    break;
                }
        return out;
    }

    std::string str() const
    {
        std::string out;
        for (auto s : symbols_)
            out.push_back(static_cast<char>(s));
        return out;
    }

    friend bool operator==(const MovementUnit&, const MovementUnit&) = default;

private:
    explicit MovementUnit(std::array<Motion, kUnitLength> s) : symbols_(s) {}
    std::array<Motion, kUnitLength> symbols_;
};

class FunctionUnit {
public:
    static FunctionUnit parse(std::string_view text)
    {
        require(text.size() == kUnitLength, ErrorCode::InvalidSymbol,
                "function unit must have 5 symbols, got '" + std::string(text) + "'");
        std::array<Function, kUnitLength> fns{};
        bool any_m = false;
        for (std::size_t i = 0; i < kUnitLength; ++i) {
            const char c = text[i];
            require(c == 'M' || c == 'F', ErrorCode::InvalidSymbol,
                    "invalid symbol '" + std::string(1, c) + "' in function unit '" + std::string(text) + "'");
            fns[i] = static_cast<Function>(c);
            any_m = any_m || c == 'M';
        }
        require(any_m, ErrorCode::EmptyAssignment, "function unit '" + std::string(text) + "' has no M finger");
        return FunctionUnit(fns);
    }

    const std::array<Function, kUnitLength>& functions() const noexcept { return functions_; }
    Function operator[](std::size_t finger) const { return functions_[finger]; }
    Function of(Finger f) const { return functions_[static_cast<std::size_t>(f)]; }

    std::set<Finger> manipulation_fingers() const
    {
        std::set<Finger> out;
        for (auto f : kAllFingers)
            if (of(f) == Function::M)
                out.insert(f);
        return out;
    }

    std::size_t manipulation_count() const { return manipulation_fingers().size(); }

    std::string str() const
    {
        std::string out;
        for (auto f : functions_)
            out.push_back(static_cast<char>(f));
        return out;
    }

    friend bool operator==(const FunctionUnit&, const FunctionUnit&) = default;

private:
    explicit FunctionUnit(std::array<Function, kUnitLength> f) : functions_(f) {}
    std::array<Function, kUnitLength> functions_;
};

inline MovementUnit parse_movement_unit(std::string_view text) { return MovementUnit::parse(text); }

/// Splits a unit into one unit per motion group (X, then Y, then Z). Each
/// output keeps only that group's fingers, relabeled X; the rest become O.
inline std::vector<MovementUnit> decompose_unit(const MovementUnit& u)
{
    const auto groups = u.groups();
    if (groups.size() <= 1)
        return {u};
    std::vector<MovementUnit> out;
    for (auto g : groups) {
        std::string text(kUnitLength, 'O');
        for (std::size_t i = 0; i < kUnitLength; ++i)
            if (u[i] == g)
                text[i] = 'X';
        out.push_back(MovementUnit::parse(text));
    }
    return out;
}

inline FunctionUnit unit_to_function(const MovementUnit& u)
{
    const auto groups = u.groups();
    require(groups.size() <= 1, ErrorCode::MultiGroup, "'" + u.str() + "' has more than one motion group");
    require(groups.size() == 1, ErrorCode::EmptyAssignment, "'" + u.str() + "' has no moving finger");
    std::string text(kUnitLength, 'F');
    for (std::size_t i = 0; i < kUnitLength; ++i)
        if (u[i] != Motion::O)
            text[i] = 'M';
    return FunctionUnit::parse(text);
}

/// Joints of the M fingers, ascending.
inline JointSubset function_to_subspace(const FunctionUnit& fu, const HandModel& model)
{
    return model.joints_for_fingers(fu.manipulation_fingers());
}

struct CatalogEntry {
    MovementUnit unit;
    double frequency_percent;
};

/// The twelve function units of the standard synergy database, in order.
inline const std::vector<FunctionUnit>& fdms_unit_catalog()
{
    static const std::vector<FunctionUnit> units = [] {
        std::vector<FunctionUnit> out;
        for (auto text : {"MMMMM", "MFFFF", "FMMMM", "MMFFF", "FFMMM", "FFFMM", "FMFFF", "MMMFF", "FFMFF", "FFMMF",
                          "MMMMF", "FMMMF"})
            out.push_back(FunctionUnit::parse(text));
        return out;
    }();
    return units;
}

/// Typical human movement units observed in more than 1% of manipulations,
/// with their frequency in percent.
inline const std::vector<CatalogEntry>& movement_unit_catalog()
{
    static const std::vector<CatalogEntry> entries = [] {
        struct Row {
            const char* unit;
            double freq;
        };
        constexpr Row rows[] = {
            {"XXXXX", 8.5}, {"XYYYY", 9.0}, {"XOOOO", 8.9}, {"OXXXX", 3.5}, {"XXYYY", 1.9}, {"XXOOO", 3.2},
            {"OOXXX", 5.1}, {"OOOXX", 2.4}, {"XYZZZ", 3.5}, {"XYOOO", 4.8}, {"OXYYY", 2.6}, {"OXOOO", 8.9},
            {"XYYOO", 1.9}, {"OOXOO", 1.9}, {"OOXXO", 1.3}, {"XYYYO", 1.0},
        };
        std::vector<CatalogEntry> out;
        for (const auto& r : rows)
            out.push_back({MovementUnit::parse(r.unit), r.freq});
        return out;
    }();
    return entries;
}

} // namespace fdms
