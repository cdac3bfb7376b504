// World <-> screen transform with pan and zoom. World y points up
// (map coordinates); screen y points down.

export class Camera {
    scale = 5; // pixels per meter
    centerX = 0; // world coords at the viewport center
    centerY = 0;

    constructor(public viewWidth: number, public viewHeight: number) {}

    toScreen(wx: number, wy: number): [number, number] {
        return [
            this.viewWidth / 2 + (wx - this.centerX) * this.scale,
            this.viewHeight / 2 - (wy - this.centerY) * this.scale,
        ];
    }

    toWorld(sx: number, sy: number): [number, number] {
        return [
            this.centerX + (sx - this.viewWidth / 2) / this.scale,
            this.centerY - (sy - this.viewHeight / 2) / this.scale,
        ];
    }

    panByScreen(dx: number, dy: number): void {
        this.centerX -= dx / this.scale;
        this.centerY += dy / this.scale;
    }

    /** Zoom by a factor keeping the world point under (sx, sy) fixed. */
    zoomAt(sx: number, sy: number, factor: number): void {
        const [wx, wy] = this.toWorld(sx, sy);
        this.scale = Math.min(Math.max(this.scale * factor, 0.2), 400);
        const [nsx, nsy] = this.toScreen(wx, wy);
        this.panByScreen(sx - nsx, sy - nsy);
    }

    fitBounds(minX: number, minY: number, maxX: number, maxY: number, margin = 40): void {
        const spanX = Math.max(maxX - minX, 1e-6);
        const spanY = Math.max(maxY - minY, 1e-6);
        this.scale = Math.min(
            (this.viewWidth - 2 * margin) / spanX,
            (this.viewHeight - 2 * margin) / spanY,
        );
        this.scale = Math.min(Math.max(this.scale, 0.2), 400);
        this.centerX = (minX + maxX) / 2;
        this.centerY = (minY + maxY) / 2;
    }
}

export interface PointLike {
    id: string;
    x: number;
    y: number;
}

/** Nearest point within radiusPx of the screen position, or null. */
export function hitTest(
    points: Iterable<PointLike>,
    camera: Camera,
    sx: number,
    sy: number,
    radiusPx = 10,
): string | null {
    let best: string | null = null;
    let bestDist = radiusPx;
    for (const p of points) {
        const [px, py] = camera.toScreen(p.x, p.y);
        const d = Math.hypot(px - sx, py - sy);
        if (d <= bestDist) {
            bestDist = d;
            best = p.id;
        }
    }
    return best;
}
