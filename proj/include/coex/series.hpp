#pragma once

#include <Eigen/Core>

namespace coex {

/// Chronological data indexed (year, hour), stored year-major.
struct ChronoSeries {
  Eigen::ArrayXd values;
  int years = 0;
  int hours = 0;

  ChronoSeries() = default;
  ChronoSeries(Eigen::ArrayXd v, int n_years, int n_hours)
      : values(std::move(v)), years(n_years), hours(n_hours) {}

  static ChronoSeries zeros(int n_years, int n_hours) {
    return ChronoSeries(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(n_years) * n_hours),
                        n_years, n_hours);
  }

  bool empty() const { return values.size() == 0; }
  bool shape_ok() const {
    return values.size() == static_cast<Eigen::Index>(years) * hours;
  }

  double at(int year, int hour) const {
    return values[static_cast<Eigen::Index>(year) * hours + hour];
  }
  double& at(int year, int hour) {
    return values[static_cast<Eigen::Index>(year) * hours + hour];
  }

  /// One year as a view.
  auto year(int y) const {
    return values.segment(static_cast<Eigen::Index>(y) * hours, hours);
  }
  auto year(int y) {
    return values.segment(static_cast<Eigen::Index>(y) * hours, hours);
  }
};

}  // namespace coex
