"use strict";
/** API payload shapes, mirroring the service's JSON exactly. */
Object.defineProperty(exports, "__esModule", { value: true });
