#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "rtms/boundary.hpp"
#include "rtms/config.hpp"
#include "rtms/fdsolver.hpp"
#include "rtms/gather.hpp"
#include "rtms/raytools.hpp"

namespace rtms {

/// Uniform frequencies over [f_lo, f_hi] with weights rising and falling along cosine ramps.
/// The weights vanish at both ends of the band.
struct ImagingBand {
  std::vector<double> freqs;    // Hz
  std::vector<double> weights;  // Omega
  double df = 0.0;              // Hz
  std::size_t size() const noexcept { return freqs.size(); }
};

ImagingBand imaging_band(double f_lo, double f_hi, std::size_t nfreq, double ramp_fraction);
ImagingBand imaging_band(const ExperimentConfig& cfg);

struct ImageResult {
  ScalarField image;
  ImagingCondition condition = ImagingCondition::ratio;
  std::vector<double> freqs;
  double epsilon = 0.0;
  bool shadow_masked = false;
  double imag_ratio = 0.0;  // |sum of imaginary parts| / |sum of real parts|, bookkeeping only
};

/// Receivers of the experiment: every surface column inside [x1_min, x1_max].
ReceiverLine receiver_line(const ExperimentConfig& cfg);
TimeStepping time_stepping(const ExperimentConfig& cfg);
std::vector<double> source_signature(const ExperimentConfig& cfg);
FMParams fm_params(const ExperimentConfig& cfg, const ScalarField& c);

/// W(f) = sum_k w_k exp(-2 pi i f k dt) dt for each f.
std::vector<std::complex<double>> wavelet_spectrum(const std::vector<double>& w, double dt,
                                                   const std::vector<double>& freqs);

struct ForwardProducts {
  SurfaceGather background;  // direct wave only
  SurfaceGather scattered;   // direct wave removed
  FreqSlices g_hat;          // source field on the imaging zone
};

/// Born data plus the background source field, in one or two FD passes depending on cfg.born.
ForwardProducts forward_model(const ExperimentConfig& cfg, const ScalarField& c, const ScalarField& r);

/// Scattered surface data for the contrast r.
SurfaceGather born_data(const ExperimentConfig& cfg, const ScalarField& c, const ScalarField& r);

/// Source field g_hat on the imaging zone.
FreqSlices source_slices(const ExperimentConfig& cfg, const ScalarField& c);

/// F_M followed by the time-reversed run; u_r_hat on the imaging zone.
FreqSlices reverse_continue(const SurfaceGather& d_scat, const ScalarField& c, const ExperimentConfig& cfg);

/// Gradient-ratio condition. c must live on the slice grid.
ImageResult image_ratio(const FreqSlices& g_hat, const FreqSlices& u_r, const ScalarField& c,
                        const ImagingBand& band, double epsilon);

/// Excitation-time condition for n = 2. go and c must live on the slice grid; wavelet holds
/// W(f) for each band frequency and is divided out.
ImageResult image_excitation(const FreqSlices& u_r, const GoFields& go, const ScalarField& c,
                             const ImagingBand& band, const std::vector<std::complex<double>>& wavelet);

/// Plain crosscorrelation 2 df sum_w Re(conj(g_hat) u_r_hat) over every slice, without Omega.
ImageResult image_xcorr(const FreqSlices& g_hat, const FreqSlices& u_r, const ImagingBand& band);

/// Cropped copy of GoFields.
GoFields crop(const GoFields& go, const IndexBox& box);

/// Fraction of image energy at wavenumbers below k_min (rad/m).
double low_wavenumber_fraction(const ScalarField& image, double k_min);

/// 2 * 2 pi f_lo / max(c): smallest reflector wavenumber the band can produce.
double min_reflectivity_wavenumber(const ImagingBand& band, const ScalarField& c);

/// Direction-resolved aperture on a coarse set of cells. mask holds, per sampled cell and dip,
/// the resolution-mask value; dips are measured from horizontal, in degrees.
struct ApertureMap {
  Grid2D cells;                    // the sampled cells as a grid
  std::vector<double> dips_deg;    // ndips values in [-90, 90)
  std::vector<double> mask;        // cells.size() * ndips, cell-major
  MaskField shadow;                // on `cells`
  MaskField multipath;             // on `cells`
  double at(std::size_t i, std::size_t j, std::size_t d) const {
    return mask[(j * cells.nx1() + i) * dips_deg.size() + d];
  }
  /// Largest mask value over all dips at a sampled cell.
  double coverage(std::size_t i, std::size_t j) const;
  /// Dip interval [lo, hi] (deg) of the contiguous run of recoverable dips containing the best
  /// one; empty when nothing is recoverable.
  bool dip_range(std::size_t i, std::size_t j, double threshold, double& lo, double& hi) const;
};

ApertureMap predict_aperture(const IndexBox& zone, const GoFields& go, const ScalarField& c,
                             const ArraySpec& array, double t_max, std::size_t stride,
                             std::size_t ndips);

}  // namespace rtms
