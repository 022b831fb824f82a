#pragma once

#include <string>
#include <vector>

#include "afb/morphology.hpp"

namespace afb {

// Geometry of one labeled blob.
//   circularity = 4*pi*A / p^2
//   roughness   = convex hull perimeter / p
//   axis lengths are 4*sqrt(lambda) of the second-central-moment ellipse
//   eccentricity = sqrt(1 - lambda_minor / lambda_major)
struct ShapeDescriptors {
  std::size_t area = 0;
  double perimeter = 0.0;
  double circularity = 0.0;
  double roughness = 0.0;
  double major_axis_length = 0.0;
  double minor_axis_length = 0.0;
  double eccentricity = 0.0;
  double convex_hull_perimeter = 0.0;

  double axis_ratio() const {
    return minor_axis_length > 0.0 ? major_axis_length / minor_axis_length : 0.0;
  }
};

// Inclusive acceptance interval for one descriptor.
struct GateInterval {
  double min = 0.0;
  double max = 0.0;
  bool contains(double v) const { return v >= min && v <= max; }
};

// Acceptance intervals separating bacilli from debris. Defaults are the
// output of `afb-screen calibrate --seed 42` on the synthetic rod corpus.
struct ClassifierGates {
  GateInterval area{26.587999999999994, 547.412};
  GateInterval eccentricity{0.9052709529360802, 1.0};
  GateInterval circularity{0.14992963250954458, 0.8412528526956141};
  GateInterval roughness{0.9251931611506597, 1.0};
  GateInterval major_axis_length{11.841568945641384, 71.88284167786726};
};

enum class Verdict { Bacillus, Debris };

std::string to_string(Verdict v);

// Classified component: verdict is Bacillus iff rejected_by is empty.
struct Detection {
  Component component;
  ShapeDescriptors descriptors;
  Verdict verdict = Verdict::Debris;
  std::vector<std::string> rejected_by;
};

// Moore boundary trace of the component, clockwise, starting from the first
// boundary pixel in raster order. The contour is closed (last -> first step
// implied). A single-pixel component yields a one-entry contour.
std::vector<PixelCoord> trace_contour(const Component& c);

// Contour length: axial steps count 1, diagonal steps sqrt(2), including the
// closing step. Single pixel uses the pixel-edge convention and counts 4.
double contour_perimeter(const std::vector<PixelCoord>& contour);

// All descriptors for one component. Throws DegenerateMoments when the
// moment ellipse collapses entirely (single pixel).
ShapeDescriptors compute_descriptors(const Component& c);

// Checks every gated descriptor against its interval; failing gate names are
// collected (in a fixed order) into rejected_by.
Detection classify(Component component, const ShapeDescriptors& d, const ClassifierGates& gates);

}  // namespace afb
