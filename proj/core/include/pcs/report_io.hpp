#pragma once

// Text serializations: CSV tables, JSON records and the plain signal format.

#include <iosfwd>
#include <span>
#include <string>

#include "pcs/estimator.hpp"
#include "pcs/experiment.hpp"
#include "pcs/likelihood.hpp"
#include "pcs/sensing.hpp"
#include "pcs/signals.hpp"

namespace pcs {

/// 17 significant digits, locale independent; reads back to the same double.
std::string format_double(double value);

std::string matrix_report_csv_header();
std::string matrix_report_csv_row(const MatrixPropertyReport& report);
void write_matrix_reports_csv(std::ostream& out, std::span<const MatrixPropertyReport> reports);

std::string risk_report_csv_header();
std::string risk_report_csv_row(const RiskReport& report);
std::string risk_report_json(const RiskReport& report);

std::string estimator_result_json(const EstimatorResult& result, const SeedBundle& seeds);

void write_observation_csv(std::ostream& out, const Observation& y);

/// First line "m I basis", then one value per line.
void write_signal(std::ostream& out, const IntensitySignal& signal, BasisKind basis);

struct SignalFile {
  IntensitySignal signal;
  BasisKind basis;
};

/// Throws InvalidArgument on malformed input.
SignalFile read_signal(std::istream& in);

}  // namespace pcs
