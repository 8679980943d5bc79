#pragma once

#include <boost/property_tree/ptree.hpp>
#include <iosfwd>
#include <optional>
#include <string>

#include "lobvol/core_data.hpp"
#include "lobvol/hausman.hpp"
#include "lobvol/montecarlo.hpp"
#include "lobvol/simulator.hpp"

namespace lobvol {

// One trading day of 23,400 seconds is 1/252 of a year.
inline constexpr double kDaySeconds = 23400.0;
inline constexpr double kTradingDays = 252.0;

struct LoadOptions {
  bool raw_price = false;  // take logs of the price column
  // Session window in seconds; for ISO-8601 timestamps these are seconds of
  // the day. Rows outside are dropped and the start becomes time zero.
  std::optional<double> session_start;
  std::optional<double> session_end;
};

struct LoadReport {
  TickSeries series;
  std::size_t duplicates_dropped = 0;
  std::size_t trimmed = 0;
};

// CSV with header time,price[,I,V,D,S,QD,OFI]. Times (and D) in seconds or
// ISO-8601; converted to years. Throws ParseError or EmptyFile.
LoadReport load_ticks(const std::string& path, const LoadOptions& opts = {});
LoadReport read_ticks(std::istream& in, const LoadOptions& opts = {});
void write_ticks(std::ostream& os, const TickSeries& series);

// "HH:MM:SS[.fff]" or plain seconds.
double parse_clock(const std::string& s);

using Config = boost::property_tree::ptree;

// Flat INI sections. Throws InvalidConfig when unreadable.
Config load_config(const std::string& path);

ScenarioConfig scenario_from_config(const Config& cfg);
TestConfig test_from_config(const Config& cfg);
StudyConfig study_from_config(const Config& cfg);

}  // namespace lobvol
