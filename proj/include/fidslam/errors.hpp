// -*-c++-*---------------------------------------------------------------------------------------
// Copyright 2026 The fidslam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FIDSLAM__ERRORS_HPP_
#define FIDSLAM__ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fidslam
{
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// camera / geometry
class PointBehindCamera : public Error
{
public:
  using Error::Error;
};
class NonPositiveSize : public Error
{
public:
  using Error::Error;
};
class DegenerateConfiguration : public Error
{
public:
  using Error::Error;
};
class NoValidPose : public Error
{
public:
  using Error::Error;
};

// configuration and input
class ParseError : public Error
{
public:
  using Error::Error;
};
class ValidationError : public Error
{
public:
  using Error::Error;
};
class OutOfOrderFrame : public Error
{
public:
  using Error::Error;
};
class UnknownBody : public Error
{
public:
  using Error::Error;
};
class NoPoses : public Error
{
public:
  using Error::Error;
};

// optimization
class SingularSystem : public Error
{
public:
  using Error::Error;
};

class EvaluationFailure : public Error
{
public:
  EvaluationFailure(uint64_t factorId, const std::string & what)
  : Error(what), factorId_(factorId)
  {
  }
  uint64_t factorId() const { return factorId_; }

private:
  uint64_t factorId_{0};
};

class InitializationImpossible : public Error
{
public:
  using Error::Error;
};
}  // namespace fidslam
#endif  // FIDSLAM__ERRORS_HPP_
