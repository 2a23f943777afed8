#pragma once

// Synthetic Gaussian blobs and the x,y[,label] CSV format.

#include <cstdint>
#include <string>
#include <vector>

#include "polclust/embedding.hpp"
#include "polclust/kernels.hpp"

namespace polclust {

enum class BlobLayout { ring, grid };

struct BlobSpec {
  int k = 2;
  std::size_t n_per_blob = 100;
  double d_over_sigma = 8.0;
  double sigma = 1.0;
  BlobLayout layout = BlobLayout::ring;
  std::uint64_t seed = 1;

  void validate() const;
};

// Ring: k centers evenly spaced on a circle whose chord between neighbors is
// d = d_over_sigma * sigma (k = 1 sits at the origin). Grid: rows of
// ceil(sqrt(k)) centers at spacing d.
std::vector<Point2> blob_centers(const BlobSpec& spec);

Dataset gaussian_blobs(const BlobSpec& spec);

// Header x,y,label (label column omitted when any point is unlabeled),
// 12 significant digits.
void save_dataset(const Dataset& ds, const std::string& path);
std::string dataset_csv(const Dataset& ds);

// Throws ParseError (with line number) and UnsupportedDimension.
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(const std::string& text);

// Generation sidecar: the generator settings, seed included.
std::string blob_metadata_json(const BlobSpec& spec);

}  // namespace polclust
