#pragma once

#include <cstdint>
#include <vector>

#include "uls/volume.hpp"

namespace uls {

enum class Conn3D { Six = 6, TwentySix = 26 };
enum class Conn2D { Four = 4, Eight = 8 };

enum class MorphOp { Dilate, Erode };

/// Component labels: 0 = background, 1..count = components in first-encounter
/// scan order (linear index ascending, x fastest).
struct ComponentLabels3D {
  Dims3 dims;
  std::vector<std::int32_t> labels;
  int count = 0;
};

struct ComponentLabels2D {
  int width = 0, height = 0;
  std::vector<std::int32_t> labels;
  int count = 0;
};

ComponentLabels3D label_components(const BinaryMask& mask, Conn3D conn);
ComponentLabels2D label_components(const Mask2D& mask, Conn2D conn);

/// Morphological dilation/erosion by a discrete metric ball of the given
/// radius. The connectivity selects the metric: 6/4 gives the L1 (diamond)
/// ball, 26/8 the Chebyshev (box) ball. Dilation clips at the frame; erosion
/// treats out-of-frame as foreground, which keeps opening anti-extensive and
/// closing extensive right up to the borders.
BinaryMask morph(const BinaryMask& mask, MorphOp op, int radius_px, Conn3D conn);
Mask2D morph(const Mask2D& mask, MorphOp op, int radius_px, Conn2D conn);

}  // namespace uls
