// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

namespace b2dr {

/// Token matrix, one token per row.
using TokenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// softmax((H_cur + PE_cur)(H_ref + PE_ref)^T / sqrt(d)), N_q x N_k.
TokenMatrix attention_weights(const TokenMatrix& h_cur, const TokenMatrix& pe_cur,
                              const TokenMatrix& h_ref, const TokenMatrix& pe_ref);

/// Scaled dot-product attention with position-augmented queries and keys and
/// raw reference features as values. Throws ShapeError on mismatched
/// dimensions or empty inputs.
TokenMatrix reference_cross_attention(const TokenMatrix& h_cur, const TokenMatrix& pe_cur,
                                      const TokenMatrix& h_ref, const TokenMatrix& pe_ref);

}  // namespace b2dr
