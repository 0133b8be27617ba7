// Copyright 2026 the fastresume contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef FASTRESUME_RESULT_HPP_
#define FASTRESUME_RESULT_HPP_

#include <cassert>
#include <optional>
#include <utility>
#include <variant>

namespace fastresume {

/// Minimal value-or-error return type. Errors are plain enums here, so the
/// usual expected<> machinery (unexpect tags, monadic ops) is not needed.
template <typename T, typename E>
class Result {
  public:
    Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    Result(E error) : v_(std::in_place_index<1>, error) {}

    bool ok() const { return v_.index() == 0; }
    explicit operator bool() const { return ok(); }

    T& value() {
        assert(ok());
        return std::get<0>(v_);
    }
    const T& value() const {
        assert(ok());
        return std::get<0>(v_);
    }
    E error() const {
        assert(!ok());
        return std::get<1>(v_);
    }

  private:
    std::variant<T, E> v_;
};

template <typename E>
class Result<void, E> {
  public:
    Result() = default;
    Result(E error) : error_(error) {}

    bool ok() const { return !error_.has_value(); }
    explicit operator bool() const { return ok(); }

    E error() const {
        assert(!ok());
        return *error_;
    }

  private:
    std::optional<E> error_;
};

}  // namespace fastresume

#endif  // FASTRESUME_RESULT_HPP_
