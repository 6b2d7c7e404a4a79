#pragma once

#include <vector>

#include "data.hpp"
#include "model.hpp"

namespace askl {

struct param_grid {
    std::vector<double> lambda1_values;
    std::vector<double> lambda2_values;
    std::vector<double> sigma_values;
    std::size_t folds = 5;
};

struct grid_cell {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double sigma = 0.0;
    double mean_metric = 0.0;  // mean validation metric over folds; NaN if failed
    bool failed = false;
};

struct grid_result {
    train_config best;
    std::vector<grid_cell> table;
};

// k-fold cross-validated search over the (lambda1, lambda2, sigma) grid.
// Classification maximizes accuracy, regression minimizes RMSE; ties break
// toward smaller lambda1, then lambda2, then sigma. Cells whose folds fail
// numerically are recorded and excluded. Each fold standardizes on its own
// training portion.
grid_result grid_search(const dataset& data, const param_grid& grid,
                        const train_config& base);

}  // namespace askl
