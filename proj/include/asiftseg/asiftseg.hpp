#pragma once

// Object recognition with full boundary extraction: affine-invariant (ASIFT)
// keypoints seed a maximal-similarity region merging segmentation.

#include "asiftseg/affine.hpp"
#include "asiftseg/asift.hpp"
#include "asiftseg/commands.hpp"
#include "asiftseg/contour.hpp"
#include "asiftseg/detect.hpp"
#include "asiftseg/error.hpp"
#include "asiftseg/eval.hpp"
#include "asiftseg/filter.hpp"
#include "asiftseg/image.hpp"
#include "asiftseg/image_io.hpp"
#include "asiftseg/matcher.hpp"
#include "asiftseg/meanshift.hpp"
#include "asiftseg/merge.hpp"
#include "asiftseg/model.hpp"
#include "asiftseg/netpbm.hpp"
#include "asiftseg/parallel.hpp"
#include "asiftseg/png_io.hpp"
#include "asiftseg/pyramid.hpp"
#include "asiftseg/segmentation.hpp"
#include "asiftseg/sift.hpp"
